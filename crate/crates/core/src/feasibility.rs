//! Positivity conditions for the secrecy rate and feasible-region grids.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SteepError};
use crate::model::{c1_sq_upper_bound, db_to_linear};

fn eve_phase2_factor(alpha2: f64) -> f64 {
    1.0 - 1.0 / alpha2
}

/// Smallest `p2` for which the secrecy rate is positive at a fixed `c1^2`.
///
/// Returns 0 when `alpha2 <= 1`: the bound is then non-positive and every
/// `p2 > 0` qualifies.
pub fn p2_threshold_given_c1(p1: f64, alpha1: f64, alpha2: f64, c1_sq: f64) -> Result<f64> {
    for (name, v) in [("p1", p1), ("alpha1", alpha1), ("alpha2", alpha2)] {
        if v.is_nan() || v <= 0.0 {
            return Err(SteepError::InvalidParameter {
                name,
                value: v,
                reason: "must be positive",
            });
        }
    }
    let upper = c1_sq_upper_bound(p1);
    if !(c1_sq > 0.0 && c1_sq < upper) {
        return Err(SteepError::InfeasibleWeight { c1_sq, upper });
    }
    if alpha2 <= 1.0 {
        return Ok(0.0);
    }
    Ok(eve_phase2_factor(alpha2) * (1.0 + alpha1 * p1) / c1_sq)
}

/// Infimum of [`p2_threshold_given_c1`] over all admissible `c1^2`.
pub fn p2_threshold_best_c1(p1: f64, alpha1: f64, alpha2: f64) -> f64 {
    if alpha2 <= 1.0 {
        return 0.0;
    }
    eve_phase2_factor(alpha2) * (1.0 + alpha1 + alpha1 * p1 + 1.0 / p1)
}

/// True iff some admissible `c1^2` yields a positive secrecy rate.
pub fn is_feasible(p1: f64, p2: f64, alpha1: f64, alpha2: f64) -> bool {
    p2 > p2_threshold_best_c1(p1, alpha1, alpha2)
}

/// One grid axis. Values are spaced uniformly in dB when `log` is set,
/// otherwise uniformly in linear units; `start`/`stop` are given in the
/// same units as the spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log: bool,
}

impl AxisSpec {
    pub const DEFAULT_POINTS: usize = 101;

    pub fn db(start_db: f64, stop_db: f64, points: usize) -> Self {
        Self {
            start: start_db,
            stop: stop_db,
            points,
            log: true,
        }
    }

    pub fn linear(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            log: false,
        }
    }

    /// Linear-unit axis values, strictly increasing and positive.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 {
            return Err(SteepError::InvalidGrid("axis has no points".into()));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(SteepError::InvalidGrid("axis bounds must be finite".into()));
        }
        if self.points > 1 && !(self.stop > self.start) {
            return Err(SteepError::InvalidGrid(format!(
                "axis must increase: start {} stop {}",
                self.start, self.stop
            )));
        }
        let raw: Vec<f64> = if self.points == 1 {
            vec![self.start]
        } else {
            let step = (self.stop - self.start) / (self.points - 1) as f64;
            (0..self.points).map(|i| self.start + step * i as f64).collect()
        };
        let vals: Vec<f64> = if self.log {
            raw.into_iter().map(db_to_linear).collect()
        } else {
            raw
        };
        if vals.iter().any(|v| !(*v > 0.0)) {
            return Err(SteepError::InvalidGrid("axis values must be positive".into()));
        }
        Ok(vals)
    }
}

/// Which pair of quantities is held fixed while the other pair is gridded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPair {
    /// Grid over `(p1, p2)` at fixed eavesdropper advantages.
    Advantages { alpha1: f64, alpha2: f64 },
    /// Grid over `(alpha1, alpha2)` at fixed SNRs.
    Powers { p1: f64, p2: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleRegionGrid {
    pub fixed: FixedPair,
    pub axis1_name: String,
    pub axis2_name: String,
    pub axis1_values: Vec<f64>,
    pub axis2_values: Vec<f64>,
    /// `feasible[i][j]` refers to `(axis1_values[i], axis2_values[j])`.
    pub feasible: Vec<Vec<bool>>,
}

pub fn feasible_region(fixed: FixedPair, axis1: &AxisSpec, axis2: &AxisSpec) -> Result<FeasibleRegionGrid> {
    let a1 = axis1.values()?;
    let a2 = axis2.values()?;
    let (n1, n2) = match fixed {
        FixedPair::Advantages { .. } => ("p1", "p2"),
        FixedPair::Powers { .. } => ("alpha1", "alpha2"),
    };
    let feasible = a1
        .par_iter()
        .map(|&u| {
            a2.iter()
                .map(|&v| match fixed {
                    FixedPair::Advantages { alpha1, alpha2 } => is_feasible(u, v, alpha1, alpha2),
                    FixedPair::Powers { p1, p2 } => is_feasible(p1, p2, u, v),
                })
                .collect()
        })
        .collect();
    Ok(FeasibleRegionGrid {
        fixed,
        axis1_name: n1.into(),
        axis2_name: n2.into(),
        axis1_values: a1,
        axis2_values: a2,
        feasible,
    })
}

impl FeasibleRegionGrid {
    /// Matrix CSV. The header row is `axis1\axis2` followed by the axis-2
    /// values; each following row starts with its axis-1 value and holds
    /// 0/1 feasibility flags.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec![format!("{}\\{}", self.axis1_name, self.axis2_name)];
        header.extend(self.axis2_values.iter().map(|v| format!("{v:e}")));
        wtr.write_record(&header)?;
        for (u, row) in self.axis1_values.iter().zip(&self.feasible) {
            let mut rec = vec![format!("{u:e}")];
            rec.extend(row.iter().map(|&f| if f { "1" } else { "0" }.to_string()));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn feasible_count(&self) -> usize {
        self.feasible.iter().flatten().filter(|&&f| f).count()
    }
}
