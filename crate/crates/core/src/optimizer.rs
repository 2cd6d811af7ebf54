//! Maximization of the secrecy rate over the combining weight and probe
//! power, the role-swapped averaged rate, and distance sweeps.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SteepError};
use crate::model::{c1_sq_upper_bound, db_to_linear, linear_to_db, secrecy_report, GeometryParams, SecrecyReport, SystemParams};
use crate::search::grid_golden_max;

/// Grid points per axis before golden-section refinement.
pub const GRID_POINTS: usize = 256;
/// Relative inset from both ends of the admissible `c1^2` interval.
pub const C1_INSET: f64 = 1e-9;
const C1_XTOL: f64 = 1e-11;
const P1_DB_XTOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumPoint {
    pub rs_star: f64,
    /// Only set by the joint `(p1, c1^2)` optimization.
    pub p1_star: Option<f64>,
    pub c1_sq_star: f64,
    pub report: SecrecyReport,
}

/// Search window for the probe SNR, in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P1Window {
    pub lo_db: f64,
    pub hi_db: f64,
}

impl Default for P1Window {
    fn default() -> Self {
        Self {
            lo_db: -10.0,
            hi_db: 30.0,
        }
    }
}

fn rate_or_floor(p1: f64, p2: f64, alpha1: f64, alpha2: f64, c1_sq: f64) -> f64 {
    SystemParams::new(p1, p2, alpha1, alpha2, c1_sq)
        .and_then(|p| secrecy_report(&p))
        .map(|r| r.rs)
        .unwrap_or(f64::NEG_INFINITY)
}

/// Maximizes the unclamped secrecy rate over `c1^2` at fixed powers and advantages.
pub fn optimize_c1(p1: f64, p2: f64, alpha1: f64, alpha2: f64) -> Result<OptimumPoint> {
    // Validates everything but the weight.
    let ub = c1_sq_upper_bound(p1);
    let probe = SystemParams::new(p1, p2, alpha1, alpha2, 0.5 * ub)?;
    let (c1_sq, _) = grid_golden_max(
        |c| rate_or_floor(p1, p2, alpha1, alpha2, c),
        ub * C1_INSET,
        ub * (1.0 - C1_INSET),
        GRID_POINTS,
        C1_XTOL,
    );
    let report = secrecy_report(&probe.with_c1_sq(c1_sq)?)?;
    Ok(OptimumPoint {
        rs_star: report.rs,
        p1_star: None,
        c1_sq_star: c1_sq,
        report,
    })
}

/// Joint maximization over `(p1, c1^2)`; the outer search runs in dB.
pub fn optimize_p1_c1(p2: f64, alpha1: f64, alpha2: f64, window: P1Window) -> Result<OptimumPoint> {
    if !(window.lo_db.is_finite() && window.hi_db.is_finite() && window.hi_db > window.lo_db) {
        return Err(SteepError::InvalidGrid(format!(
            "p1 window [{}, {}] dB is empty or invalid",
            window.lo_db, window.hi_db
        )));
    }
    // Surface parameter errors before searching.
    optimize_c1(db_to_linear(window.lo_db), p2, alpha1, alpha2)?;
    let (p1_db, _) = grid_golden_max(
        |x| {
            optimize_c1(db_to_linear(x), p2, alpha1, alpha2)
                .map(|o| o.rs_star)
                .unwrap_or(f64::NEG_INFINITY)
        },
        window.lo_db,
        window.hi_db,
        GRID_POINTS,
        P1_DB_XTOL,
    );
    let p1 = db_to_linear(p1_db);
    let inner = optimize_c1(p1, p2, alpha1, alpha2)?;
    Ok(OptimumPoint {
        p1_star: Some(p1),
        ..inner
    })
}

pub fn optimize_p1_c1_geometry(p2: f64, geom: &GeometryParams, window: P1Window) -> Result<OptimumPoint> {
    let (a1, a2) = geom.eve_advantages();
    optimize_p1_c1(p2, a1, a2, window)
}

/// Both sessions of a role-swapped pair under one fixed weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedRate {
    pub c1_sq_hat: f64,
    /// Alice transmits in phase 1; Eve at fractional distance `d` from Alice.
    pub forward: SecrecyReport,
    /// Bob transmits in phase 1 with the same `p1`, `p2` and `c1^2`.
    pub reverse: SecrecyReport,
    pub rs_bar: f64,
}

/// Weight maximizing the rate with Eve at `d0`.
pub fn design_weight(d0: f64, p1: f64, p2: f64, path_loss_exponent: f64, eta: f64) -> Result<f64> {
    let (a1, a2) = GeometryParams::new(d0, path_loss_exponent, eta)?.eve_advantages();
    Ok(optimize_c1(p1, p2, a1, a2)?.c1_sq_star)
}

/// Averaged rate at Eve position `d` for a given weight. The reverse session
/// sees the advantages swapped.
pub fn averaged_rate_with_weight(c1_sq: f64, d: f64, p1: f64, p2: f64, path_loss_exponent: f64, eta: f64) -> Result<AveragedRate> {
    let (a1, a2) = GeometryParams::new(d, path_loss_exponent, eta)?.eve_advantages();
    let forward = secrecy_report(&SystemParams::new(p1, p2, a1, a2, c1_sq)?)?;
    let reverse = secrecy_report(&SystemParams::new(p1, p2, a2, a1, c1_sq)?)?;
    Ok(AveragedRate {
        c1_sq_hat: c1_sq,
        forward,
        reverse,
        rs_bar: 0.5 * (forward.rs_plus + reverse.rs_plus),
    })
}

pub fn averaged_rate_detail(d0: f64, d: f64, p1: f64, p2: f64, path_loss_exponent: f64, eta: f64) -> Result<AveragedRate> {
    let c1_sq = design_weight(d0, p1, p2, path_loss_exponent, eta)?;
    averaged_rate_with_weight(c1_sq, d, p1, p2, path_loss_exponent, eta)
}

/// Mean of the clamped forward and reverse rates with the weight designed at `d0`.
pub fn averaged_rate(d0: f64, d: f64, p1: f64, p2: f64, path_loss_exponent: f64, eta: f64) -> Result<f64> {
    averaged_rate_detail(d0, d, p1, p2, path_loss_exponent, eta).map(|a| a.rs_bar)
}

/// `d = 0.01, 0.02, ..., 0.99`.
pub fn default_d_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SweepMode {
    /// Per-`d` joint optimum over `(p1, c1^2)`.
    Joint { p2: f64, window: P1Window },
    /// One weight designed at `d0`, fixed `p1`.
    FixedWeight { p1: f64, p2: f64, d0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub path_loss_exponent: f64,
    pub eta: f64,
    pub d_values: Vec<f64>,
}

impl SweepConfig {
    /// Fixed-weight sweep at p2 = 20 dB, p1 = 5 dB, d0 = 0.5, worst-case geometry.
    pub fn fixed_weight_default() -> Self {
        Self {
            mode: SweepMode::FixedWeight {
                p1: db_to_linear(5.0),
                p2: db_to_linear(20.0),
                d0: 0.5,
            },
            path_loss_exponent: 2.0,
            eta: 1.0,
            d_values: default_d_grid(),
        }
    }

    /// Joint-optimum sweep at p2 = 20 dB, worst-case geometry.
    pub fn joint_default() -> Self {
        Self {
            mode: SweepMode::Joint {
                p2: db_to_linear(20.0),
                window: P1Window::default(),
            },
            path_loss_exponent: 2.0,
            eta: 1.0,
            d_values: default_d_grid(),
        }
    }
}

/// One row of a distance sweep. Field names are the CSV column names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub d: f64,
    pub rs_hat_plus: f64,
    pub rs_bar: f64,
    pub c1_sq_star: f64,
    pub p1_star_db: f64,
    pub rs_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSweep {
    pub config: SweepConfig,
    pub records: Vec<SweepRecord>,
}

impl DistanceSweep {
    pub const COLUMNS: [&'static str; 6] = ["d", "rs_hat_plus", "rs_bar", "c1_sq_star", "p1_star_db", "rs_star"];

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for r in &self.records {
            wtr.serialize(r)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn d_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.d).collect()
    }
}

/// In fixed-weight mode `rs_star` is the unclamped forward rate under the
/// designed weight. In joint mode `rs_bar` pairs each per-`d` optimum with
/// its role-swapped session under the same `(p1, c1^2)`.
pub fn sweep_distance(config: &SweepConfig) -> Result<DistanceSweep> {
    if config.d_values.is_empty() {
        return Err(SteepError::InvalidGrid("empty d grid".into()));
    }
    if let Some(bad) = config.d_values.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
        return Err(SteepError::InvalidGrid(format!("d = {bad} outside (0, 1)")));
    }
    let (ple, eta) = (config.path_loss_exponent, config.eta);
    let records = match config.mode {
        SweepMode::FixedWeight { p1, p2, d0 } => {
            let c1_sq = design_weight(d0, p1, p2, ple, eta)?;
            config
                .d_values
                .par_iter()
                .map(|&d| {
                    let avg = averaged_rate_with_weight(c1_sq, d, p1, p2, ple, eta)?;
                    Ok(SweepRecord {
                        d,
                        rs_hat_plus: avg.forward.rs_plus,
                        rs_bar: avg.rs_bar,
                        c1_sq_star: c1_sq,
                        p1_star_db: linear_to_db(p1),
                        rs_star: avg.forward.rs,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        SweepMode::Joint { p2, window } => config
            .d_values
            .par_iter()
            .map(|&d| {
                let geom = GeometryParams::new(d, ple, eta)?;
                let opt = optimize_p1_c1_geometry(p2, &geom, window)?;
                let p1 = opt.p1_star.expect("joint optimum carries p1");
                let avg = averaged_rate_with_weight(opt.c1_sq_star, d, p1, p2, ple, eta)?;
                Ok(SweepRecord {
                    d,
                    rs_hat_plus: opt.report.rs_plus,
                    rs_bar: avg.rs_bar,
                    c1_sq_star: opt.c1_sq_star,
                    p1_star_db: linear_to_db(p1),
                    rs_star: opt.rs_star,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(DistanceSweep {
        config: config.clone(),
        records,
    })
}

/// Point of the `(p1, c1^2)` surface at fixed `p2` and geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub p1_db: f64,
    pub c1_sq: f64,
    pub rs: f64,
}

/// Rate surface over a `p1` (dB) grid and a grid of `c1^2` expressed as
/// fractions of each `p1`'s admissible upper bound.
pub fn rate_surface(p2: f64, alpha1: f64, alpha2: f64, p1_db: &[f64], c1_fraction: &[f64]) -> Result<Vec<SurfacePoint>> {
    if p1_db.is_empty() || c1_fraction.is_empty() {
        return Err(SteepError::InvalidGrid("empty surface grid".into()));
    }
    if let Some(f) = c1_fraction.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
        return Err(SteepError::InvalidGrid(format!("c1 fraction {f} outside (0, 1)")));
    }
    let mut out = Vec::with_capacity(p1_db.len() * c1_fraction.len());
    for &x in p1_db {
        let p1 = db_to_linear(x);
        let ub = c1_sq_upper_bound(p1);
        for &f in c1_fraction {
            let c1_sq = f * ub;
            let rs = secrecy_report(&SystemParams::new(p1, p2, alpha1, alpha2, c1_sq)?)?.rs;
            out.push(SurfacePoint { p1_db: x, c1_sq, rs });
        }
    }
    Ok(out)
}
