//! Command-line front end. The `steep` binary is a thin wrapper around
//! [`main_with_args`]; every subcommand renders to a string so it can be
//! exercised in-process.
//!
//! SNRs are given in dB on the command line and converted once here.

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::coding::{select_pairs, standard_rates, CodePair, CodeRate, DEFAULT_M_MAX};
use crate::error::{Result, SteepError};
use crate::feasibility::{feasible_region, AxisSpec, FixedPair};
use crate::model::{db_to_linear, secrecy_report, GeometryParams, SecrecyReport, SystemParams};
use crate::montecarlo::{empirical_mse_eve, empirical_mse_eve_sample_cov, empirical_mse_user, simulate, MseEstimate, MIN_SAMPLES_SAMPLE_COV};
use crate::optimizer::{optimize_c1, rate_surface, sweep_distance, DistanceSweep, P1Window, SweepConfig, SweepMode};
use crate::privacy::{end_to_end_keygen, CodeChoice, HashSeed, KeygenScenario};
use crate::rng::{os_seed, GENERATOR_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "steep", version, about = "Secrecy-rate analysis and key distillation for echoed-probe round trips")]
pub struct Cli {
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV (tabular outputs).
    #[arg(long, global = true)]
    pub csv: bool,
    /// Write output to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<std::path::PathBuf>,
    /// 64-bit simulation seed in hex. Drawn from OS entropy and echoed when absent.
    #[arg(long, global = true, value_name = "HEX", value_parser = parse_hex_seed)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_hex_seed(s: &str) -> std::result::Result<u64, String> {
    let t = s.trim().trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(t, 16).map_err(|e| format!("seed must be hex: {e}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Secrecy report at one parameter point.
    Rate(RateArgs),
    /// Secrecy rate over a (p1, c1^2) grid.
    SweepSurface(SurfaceArgs),
    /// Rates versus eavesdropper position.
    SweepDistance(DistanceArgs),
    /// Feasible region for a positive secrecy rate.
    Feasible(FeasibleArgs),
    /// Code-rate / constellation pairs between the two capacities.
    Codes(CodesArgs),
    /// Monte Carlo check of the closed-form MMSEs.
    Simulate(SimulateArgs),
    /// Two opposite sessions plus privacy amplification.
    Keygen(KeygenArgs),
}

/// Eavesdropper given either by geometry or by explicit advantages.
#[derive(Debug, Clone, Args)]
#[group(id = "eve", required = true, multiple = true)]
pub struct EveArgs {
    /// Eve's distance from the phase-1 transmitter as a fraction of the link length.
    #[arg(long, conflicts_with_all = ["alpha1", "alpha2"])]
    pub d: Option<f64>,
    /// Eve's phase-1 advantage (linear).
    #[arg(long, requires = "alpha2")]
    pub alpha1: Option<f64>,
    /// Eve's phase-2 advantage (linear).
    #[arg(long, requires = "alpha1")]
    pub alpha2: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PathLossArgs {
    /// Path-loss exponent in [1, 2].
    #[arg(long = "ple", default_value_t = 2.0)]
    pub path_loss_exponent: f64,
    /// Wiretapper efficiency in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
}

impl EveArgs {
    fn advantages(&self, pl: &PathLossArgs) -> Result<(f64, f64)> {
        match (self.d, self.alpha1, self.alpha2) {
            (Some(d), _, _) => Ok(GeometryParams::new(d, pl.path_loss_exponent, pl.eta)?.eve_advantages()),
            (None, Some(a1), Some(a2)) => Ok((a1, a2)),
            _ => Err(SteepError::Invalid("give --d or both --alpha1 and --alpha2".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long)]
    pub p1_db: f64,
    #[arg(long)]
    pub p2_db: f64,
    #[command(flatten)]
    pub eve: EveArgs,
    #[command(flatten)]
    pub path_loss: PathLossArgs,
    /// Combining weight c1^2; optimized when absent.
    #[arg(long)]
    pub c1_sq: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long, default_value_t = 20.0)]
    pub p2_db: f64,
    #[arg(long, default_value_t = 0.5)]
    pub d: f64,
    #[command(flatten)]
    pub path_loss: PathLossArgs,
    #[arg(long, default_value_t = -10.0)]
    pub p1_min_db: f64,
    #[arg(long, default_value_t = 30.0)]
    pub p1_max_db: f64,
    #[arg(long, default_value_t = 81)]
    pub p1_points: usize,
    /// c1^2 grid as fractions i/(n+1), i = 1..n, of the admissible bound.
    #[arg(long, default_value_t = 99)]
    pub c1_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// One weight designed at d0, fixed p1.
    Fixed,
    /// Per-position joint optimum over (p1, c1^2).
    Joint,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long, value_enum, default_value_t = SweepKind::Fixed)]
    pub mode: SweepKind,
    #[arg(long, default_value_t = 5.0)]
    pub p1_db: f64,
    #[arg(long, default_value_t = 20.0)]
    pub p2_db: f64,
    #[arg(long, default_value_t = 0.5)]
    pub d0: f64,
    #[command(flatten)]
    pub path_loss: PathLossArgs,
    /// Grid d = i/(n+1), i = 1..n.
    #[arg(long, default_value_t = 99)]
    pub d_points: usize,
    #[arg(long, default_value_t = -10.0)]
    pub p1_min_db: f64,
    #[arg(long, default_value_t = 30.0)]
    pub p1_max_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeasibleKind {
    /// Grid over (p1, p2) at fixed (alpha1, alpha2).
    Powers,
    /// Grid over (alpha1, alpha2) at fixed (p1, p2).
    Advantages,
}

#[derive(Debug, Args)]
pub struct FeasibleArgs {
    /// Which pair is gridded.
    #[arg(long, value_enum, default_value_t = FeasibleKind::Powers)]
    pub grid: FeasibleKind,
    #[arg(long, default_value_t = 4.0)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 4.0)]
    pub alpha2: f64,
    #[arg(long, default_value_t = 5.0)]
    pub p1_db: f64,
    #[arg(long, default_value_t = 20.0)]
    pub p2_db: f64,
    /// Axis start in dB (both axes).
    #[arg(long)]
    pub min_db: Option<f64>,
    /// Axis end in dB (both axes).
    #[arg(long)]
    pub max_db: Option<f64>,
    #[arg(long, default_value_t = AxisSpec::DEFAULT_POINTS)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct CodesArgs {
    /// Legitimate effective capacity C_U (bits/sample).
    #[arg(long, requires = "cap_eve")]
    pub cap_user: Option<f64>,
    /// Eavesdropper effective capacity C_E (bits/sample).
    #[arg(long, requires = "cap_user")]
    pub cap_eve: Option<f64>,
    /// Compute capacities from parameters instead: p1 in dB.
    #[arg(long, conflicts_with = "cap_user", requires_all = ["p2_db", "c1_sq"])]
    pub p1_db: Option<f64>,
    #[arg(long)]
    pub p2_db: Option<f64>,
    #[arg(long)]
    pub c1_sq: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub d: f64,
    #[command(flatten)]
    pub path_loss: PathLossArgs,
    /// Comma-separated code rates, e.g. "1/4,1/2,3/4".
    #[arg(long, value_delimiter = ',')]
    pub rates: Option<Vec<CodeRate>>,
    #[arg(long, default_value_t = DEFAULT_M_MAX)]
    pub m_max: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub p1_db: f64,
    #[arg(long)]
    pub p2_db: f64,
    #[command(flatten)]
    pub eve: EveArgs,
    #[command(flatten)]
    pub path_loss: PathLossArgs,
    #[arg(long)]
    pub c1_sq: Option<f64>,
    /// Round trips to simulate.
    #[arg(long, default_value_t = 100_000)]
    pub k: usize,
    /// Also dump the full transcript as CSV to PATH.
    #[arg(long, value_name = "PATH")]
    pub dump: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct KeygenArgs {
    #[arg(long, default_value_t = 5.0)]
    pub p1_db: f64,
    #[arg(long, default_value_t = 20.0)]
    pub p2_db: f64,
    #[arg(long, default_value_t = 0.5)]
    pub d: f64,
    #[arg(long, default_value_t = 0.5)]
    pub d0: f64,
    #[command(flatten)]
    pub path_loss: PathLossArgs,
    #[arg(long)]
    pub c1_sq: Option<f64>,
    /// Round trips per session.
    #[arg(long, default_value_t = 10_000)]
    pub k: usize,
    #[arg(long, default_value = "1/4")]
    pub rate: CodeRate,
    #[arg(long, default_value_t = 512)]
    pub m: u64,
    /// 32-byte public hash seed in hex. Drawn from OS entropy when absent.
    #[arg(long, value_name = "HEX")]
    pub hash_seed: Option<HashSeed>,
}

/// Validated scenario shared by the simulation-backed subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub p1_db: f64,
    pub p2_db: f64,
    pub d: f64,
    pub d0: f64,
    pub path_loss_exponent: f64,
    pub eta: f64,
    pub c1_sq: Option<f64>,
    pub k: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn p1(&self) -> f64 {
        db_to_linear(self.p1_db)
    }

    pub fn p2(&self) -> f64 {
        db_to_linear(self.p2_db)
    }

    pub fn geometry(&self) -> Result<GeometryParams> {
        GeometryParams::new(self.d, self.path_loss_exponent, self.eta)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p1_db", self.p1_db), ("p2_db", self.p2_db)] {
            if !v.is_finite() {
                return Err(SteepError::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite",
                });
            }
        }
        self.geometry()?;
        GeometryParams::new(self.d0, self.path_loss_exponent, self.eta)?;
        if self.k == 0 {
            return Err(SteepError::Invalid("K must be at least 1".into()));
        }
        if let Some(c) = self.c1_sq {
            crate::model::c2_sq(self.p1(), c)?;
            if c == 0.0 {
                return Err(SteepError::InfeasibleWeight {
                    c1_sq: c,
                    upper: crate::model::c1_sq_upper_bound(self.p1()),
                });
            }
        }
        Ok(())
    }
}

/// Parameters plus a flag telling whether the weight was optimized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateOutput {
    pub params: SystemParams,
    pub c1_sq_optimized: bool,
    pub report: SecrecyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateOutput {
    pub generator: String,
    pub seed: u64,
    pub k: usize,
    pub params: SystemParams,
    pub analytic: SecrecyReport,
    pub empirical_mse_user: MseEstimate,
    pub empirical_mse_eve: MseEstimate,
    pub empirical_mse_eve_sample_cov: Option<MseEstimate>,
    pub z_user: f64,
    pub z_eve: f64,
    pub empirical_rs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodesOutput {
    pub cap_user: f64,
    pub cap_eve: f64,
    pub pairs: Vec<CodePair>,
}

fn resolve_params(p1_db: f64, p2_db: f64, eve: &EveArgs, pl: &PathLossArgs, c1_sq: Option<f64>) -> Result<(SystemParams, bool)> {
    let (a1, a2) = eve.advantages(pl)?;
    let (p1, p2) = (db_to_linear(p1_db), db_to_linear(p2_db));
    match c1_sq {
        Some(c) => Ok((SystemParams::new(p1, p2, a1, a2, c)?, false)),
        None => {
            let opt = optimize_c1(p1, p2, a1, a2)?;
            Ok((SystemParams::new(p1, p2, a1, a2, opt.c1_sq_star)?, true))
        }
    }
}

fn interior_grid(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(SteepError::InvalidGrid("grid needs at least one point".into()));
    }
    Ok((1..=n).map(|i| i as f64 / (n + 1) as f64).collect())
}

fn db_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(lo.is_finite() && hi.is_finite()) || (n > 1 && !(hi > lo)) {
        return Err(SteepError::InvalidGrid(format!("invalid dB grid [{lo}, {hi}] with {n} points")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn csv_string<F>(f: F) -> Result<String>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    String::from_utf8(buf).map_err(|e| SteepError::Io(e.to_string()))
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String> {
    csv_string(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    })
}

fn cmd_rate(a: &RateArgs, fmt: OutputFormat) -> Result<String> {
    let (params, optimized) = resolve_params(a.p1_db, a.p2_db, &a.eve, &a.path_loss, a.c1_sq)?;
    let out = RateOutput {
        params,
        c1_sq_optimized: optimized,
        report: secrecy_report(&params)?,
    };
    match fmt {
        OutputFormat::Json => to_json(&out),
        OutputFormat::Csv => csv_rows(&[out.report]),
        OutputFormat::Text => {
            let r = &out.report;
            let mut s = String::new();
            writeln!(s, "p1      = {:.4} ({:.2} dB)", params.p1(), a.p1_db).unwrap();
            writeln!(s, "p2      = {:.4} ({:.2} dB)", params.p2(), a.p2_db).unwrap();
            writeln!(s, "alpha1  = {:.6}", params.alpha1()).unwrap();
            writeln!(s, "alpha2  = {:.6}", params.alpha2()).unwrap();
            writeln!(s, "c1_sq   = {:.6}{}", params.c1_sq(), if optimized { " (optimized)" } else { "" }).unwrap();
            writeln!(s, "MSE_U   = {:.6}", r.mse_user).unwrap();
            writeln!(s, "MSE_E   = {:.6}", r.mse_eve).unwrap();
            writeln!(s, "C_U     = {:.6} bits/sample", r.cap_user).unwrap();
            writeln!(s, "C_E     = {:.6} bits/sample", r.cap_eve).unwrap();
            writeln!(s, "R_s     = {:.6} bits/round-trip sample", r.rs).unwrap();
            writeln!(s, "R_s+    = {:.6} bits/round-trip sample", r.rs_plus).unwrap();
            Ok(s)
        }
    }
}

#[derive(Serialize)]
struct SurfaceOutput {
    p2_db: f64,
    alpha1: f64,
    alpha2: f64,
    peak: crate::optimizer::SurfacePoint,
    points: Vec<crate::optimizer::SurfacePoint>,
}

fn cmd_sweep_surface(a: &SurfaceArgs, fmt: OutputFormat) -> Result<String> {
    let (a1, a2) = GeometryParams::new(a.d, a.path_loss.path_loss_exponent, a.path_loss.eta)?.eve_advantages();
    let p1s = db_grid(a.p1_min_db, a.p1_max_db, a.p1_points)?;
    let fr = interior_grid(a.c1_points)?;
    let points = rate_surface(db_to_linear(a.p2_db), a1, a2, &p1s, &fr)?;
    let peak = *points.iter().max_by(|x, y| x.rs.total_cmp(&y.rs)).expect("nonempty grid");
    match fmt {
        OutputFormat::Json => to_json(&SurfaceOutput {
            p2_db: a.p2_db,
            alpha1: a1,
            alpha2: a2,
            peak,
            points,
        }),
        OutputFormat::Csv => csv_rows(&points),
        OutputFormat::Text => {
            let mut s = String::new();
            writeln!(s, "{:>10} {:>10} {:>12}", "p1_db", "c1_sq", "rs").unwrap();
            for p in &points {
                writeln!(s, "{:>10.4} {:>10.6} {:>12.6}", p.p1_db, p.c1_sq, p.rs).unwrap();
            }
            writeln!(s, "# peak rs = {:.6} at p1 = {:.3} dB, c1_sq = {:.6}", peak.rs, peak.p1_db, peak.c1_sq).unwrap();
            Ok(s)
        }
    }
}

fn cmd_sweep_distance(a: &DistanceArgs, fmt: OutputFormat) -> Result<String> {
    let mode = match a.mode {
        SweepKind::Fixed => SweepMode::FixedWeight {
            p1: db_to_linear(a.p1_db),
            p2: db_to_linear(a.p2_db),
            d0: a.d0,
        },
        SweepKind::Joint => SweepMode::Joint {
            p2: db_to_linear(a.p2_db),
            window: P1Window {
                lo_db: a.p1_min_db,
                hi_db: a.p1_max_db,
            },
        },
    };
    let sweep = sweep_distance(&SweepConfig {
        mode,
        path_loss_exponent: a.path_loss.path_loss_exponent,
        eta: a.path_loss.eta,
        d_values: interior_grid(a.d_points)?,
    })?;
    match fmt {
        OutputFormat::Json => to_json(&sweep),
        OutputFormat::Csv => csv_string(|b| sweep.write_csv(b)),
        OutputFormat::Text => Ok(distance_table(&sweep)),
    }
}

fn distance_table(sweep: &DistanceSweep) -> String {
    let mut s = String::new();
    let c = DistanceSweep::COLUMNS;
    writeln!(s, "{:>6} {:>12} {:>12} {:>11} {:>11} {:>12}", c[0], c[1], c[2], c[3], c[4], c[5]).unwrap();
    for r in &sweep.records {
        writeln!(
            s,
            "{:>6.3} {:>12.6} {:>12.6} {:>11.6} {:>11.4} {:>12.6}",
            r.d, r.rs_hat_plus, r.rs_bar, r.c1_sq_star, r.p1_star_db, r.rs_star
        )
        .unwrap();
    }
    s
}

fn cmd_feasible(a: &FeasibleArgs, fmt: OutputFormat) -> Result<String> {
    let (fixed, lo, hi) = match a.grid {
        FeasibleKind::Powers => (
            FixedPair::Advantages {
                alpha1: a.alpha1,
                alpha2: a.alpha2,
            },
            a.min_db.unwrap_or(-10.0),
            a.max_db.unwrap_or(40.0),
        ),
        FeasibleKind::Advantages => (
            FixedPair::Powers {
                p1: db_to_linear(a.p1_db),
                p2: db_to_linear(a.p2_db),
            },
            a.min_db.unwrap_or(0.0),
            a.max_db.unwrap_or(20.0),
        ),
    };
    let axis = AxisSpec::db(lo, hi, a.points);
    let grid = feasible_region(fixed, &axis, &axis)?;
    match fmt {
        OutputFormat::Json => to_json(&grid),
        OutputFormat::Csv => csv_string(|b| grid.write_csv(b)),
        OutputFormat::Text => {
            // Rows: axis 2 descending; columns: axis 1 ascending.
            let mut s = String::new();
            writeln!(s, "feasible region, rows {} (top = max), cols {} (left = min)", grid.axis2_name, grid.axis1_name).unwrap();
            for j in (0..grid.axis2_values.len()).rev() {
                let line: String = (0..grid.axis1_values.len())
                    .map(|i| if grid.feasible[i][j] { '#' } else { '.' })
                    .collect();
                writeln!(s, "{line}").unwrap();
            }
            writeln!(s, "{} of {} points feasible", grid.feasible_count(), grid.axis1_values.len() * grid.axis2_values.len()).unwrap();
            Ok(s)
        }
    }
}

fn cmd_codes(a: &CodesArgs, fmt: OutputFormat) -> Result<String> {
    let (cu, ce) = match (a.cap_user, a.cap_eve, a.p1_db) {
        (Some(u), Some(e), _) => (u, e),
        (None, None, Some(p1_db)) => {
            let eve = EveArgs {
                d: Some(a.d),
                alpha1: None,
                alpha2: None,
            };
            let (p, _) = resolve_params(p1_db, a.p2_db.unwrap_or(20.0), &eve, &a.path_loss, a.c1_sq)?;
            let r = secrecy_report(&p)?;
            (r.cap_user, r.cap_eve)
        }
        _ => return Err(SteepError::Invalid("give --cap-user/--cap-eve or --p1-db/--p2-db/--c1-sq".into())),
    };
    let rates = a.rates.clone().unwrap_or_else(standard_rates);
    let pairs = select_pairs(cu, ce, &rates, a.m_max)?;
    let out = CodesOutput {
        cap_user: cu,
        cap_eve: ce,
        pairs,
    };
    match fmt {
        OutputFormat::Json => to_json(&out),
        OutputFormat::Csv => {
            #[derive(Serialize)]
            struct Row {
                rate: String,
                m: u64,
                bits_per_symbol: u32,
                cap_eve_over_rate: f64,
                cap_user_over_rate: f64,
                lower_margin: f64,
                upper_margin: f64,
            }
            let rows: Vec<Row> = out
                .pairs
                .iter()
                .map(|p| Row {
                    rate: p.rate.to_string(),
                    m: p.m,
                    bits_per_symbol: p.bits_per_symbol,
                    cap_eve_over_rate: p.interval_lo,
                    cap_user_over_rate: p.interval_hi,
                    lower_margin: p.lower_margin,
                    upper_margin: p.upper_margin,
                })
                .collect();
            csv_rows(&rows)
        }
        OutputFormat::Text => {
            let mut s = String::new();
            writeln!(s, "C_U = {cu:.4}, C_E = {ce:.4}").unwrap();
            writeln!(s, "{:>6} {:>6} {:>9} {:>9} {:>9} {:>9}", "R", "M", "C_E/R", "C_U/R", "lower", "upper").unwrap();
            for p in &out.pairs {
                writeln!(
                    s,
                    "{:>6} {:>6} {:>9.3} {:>9.3} {:>9.3} {:>9.3}",
                    p.rate.to_string(),
                    p.m,
                    p.interval_lo,
                    p.interval_hi,
                    p.lower_margin,
                    p.upper_margin
                )
                .unwrap();
            }
            if out.pairs.is_empty() {
                writeln!(s, "no pair satisfies C_E/R < log2 M < C_U/R").unwrap();
            }
            Ok(s)
        }
    }
}

fn cmd_simulate(a: &SimulateArgs, seed: u64, fmt: OutputFormat) -> Result<String> {
    let (params, _) = resolve_params(a.p1_db, a.p2_db, &a.eve, &a.path_loss, a.c1_sq)?;
    let analytic = secrecy_report(&params)?;
    let t = simulate(&params, a.k, seed)?;
    if let Some(path) = &a.dump {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        t.write_csv(f)?;
    }
    let mu = empirical_mse_user(&t)?;
    let me = empirical_mse_eve(&t)?;
    let sc = if t.len() >= MIN_SAMPLES_SAMPLE_COV {
        Some(empirical_mse_eve_sample_cov(&t)?)
    } else {
        None
    };
    let out = SimulateOutput {
        generator: GENERATOR_VERSION.into(),
        seed,
        k: a.k,
        params,
        analytic,
        empirical_mse_user: mu,
        empirical_mse_eve: me,
        empirical_mse_eve_sample_cov: sc,
        z_user: mu.z_score(analytic.mse_user),
        z_eve: me.z_score(analytic.mse_eve),
        empirical_rs: me.mse.log2() - mu.mse.log2(),
    };
    match fmt {
        OutputFormat::Json => to_json(&out),
        OutputFormat::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                seed: String,
                quantity: &'a str,
                analytic: f64,
                empirical: f64,
                std_err: f64,
                z: f64,
            }
            csv_rows(&[
                Row {
                    seed: format!("{seed:#018x}"),
                    quantity: "mse_user",
                    analytic: analytic.mse_user,
                    empirical: mu.mse,
                    std_err: mu.std_err,
                    z: out.z_user,
                },
                Row {
                    seed: format!("{seed:#018x}"),
                    quantity: "mse_eve",
                    analytic: analytic.mse_eve,
                    empirical: me.mse,
                    std_err: me.std_err,
                    z: out.z_eve,
                },
            ])
        }
        OutputFormat::Text => {
            let mut s = String::new();
            writeln!(s, "seed = {seed:#018x} ({GENERATOR_VERSION}), K = {}", a.k).unwrap();
            writeln!(s, "{:>9} {:>10} {:>10} {:>10} {:>6}", "", "analytic", "empirical", "std_err", "z").unwrap();
            writeln!(s, "{:>9} {:>10.6} {:>10.6} {:>10.2e} {:>6.2}", "MSE_U", analytic.mse_user, mu.mse, mu.std_err, out.z_user).unwrap();
            writeln!(s, "{:>9} {:>10.6} {:>10.6} {:>10.2e} {:>6.2}", "MSE_E", analytic.mse_eve, me.mse, me.std_err, out.z_eve).unwrap();
            if let Some(sc) = sc {
                writeln!(s, "{:>9} {:>10} {:>10.6} {:>10.2e}", "MSE_E(sc)", "", sc.mse, sc.std_err).unwrap();
            }
            writeln!(s, "R_s analytic = {:.6}, empirical = {:.6}", analytic.rs, out.empirical_rs).unwrap();
            Ok(s)
        }
    }
}

fn cmd_keygen(a: &KeygenArgs, seed: u64, fmt: OutputFormat) -> Result<String> {
    let cfg = ScenarioConfig {
        p1_db: a.p1_db,
        p2_db: a.p2_db,
        d: a.d,
        d0: a.d0,
        path_loss_exponent: a.path_loss.path_loss_exponent,
        eta: a.path_loss.eta,
        c1_sq: a.c1_sq,
        k: a.k,
        seed,
    };
    cfg.validate()?;
    let scenario = KeygenScenario {
        p1: cfg.p1(),
        p2: cfg.p2(),
        geometry: cfg.geometry()?,
        d0: cfg.d0,
        k: cfg.k,
        code: CodeChoice { rate: a.rate, m: a.m },
        c1_sq: cfg.c1_sq,
        seed,
        hash_seed: a.hash_seed.unwrap_or_else(HashSeed::from_os),
    };
    let run = end_to_end_keygen(&scenario)?;
    match fmt {
        OutputFormat::Json => to_json(&run),
        OutputFormat::Csv => csv_rows(
            &run.report
                .sessions
                .iter()
                .map(|s| {
                    (
                        format!("{:?}", s.direction),
                        s.alpha1,
                        s.alpha2,
                        s.analytic.cap_user,
                        s.analytic.cap_eve,
                        s.legit_gate,
                        s.eve_gate,
                        s.payload_bits,
                    )
                })
                .collect::<Vec<_>>(),
        )
        .map(|body| format!("direction,alpha1,alpha2,cap_user,cap_eve,legit_gate,eve_gate,payload_bits\n{body}")),
        OutputFormat::Text => {
            let r = &run.report;
            let mut s = String::new();
            writeln!(s, "seed = {:#018x}, hash seed = {}", r.seed, r.hash_seed).unwrap();
            writeln!(s, "c1_sq = {:.6}, worst-case averaged rate = {:.6} at d = {:.2}", r.c1_sq, r.rs_bar_worst, r.worst_case_d).unwrap();
            for sess in &r.sessions {
                writeln!(
                    s,
                    "{:?}: C_U = {:.4}, C_E = {:.4}, payload = {} bits, legit decodes = {}, eve decodes = {}",
                    sess.direction, sess.analytic.cap_user, sess.analytic.cap_eve, sess.payload_bits, sess.legit_gate, sess.eve_gate
                )
                .unwrap();
            }
            match (&run.key_hex, &r.failure) {
                (Some(hex), _) => writeln!(s, "key ({} bits): {hex}", r.key_length).unwrap(),
                (None, Some(f)) => writeln!(s, "no key: {f}").unwrap(),
                (None, None) => writeln!(s, "no key").unwrap(),
            }
            Ok(s)
        }
    }
}

/// Runs a parsed command and returns the rendered output.
pub fn run(cli: &Cli) -> Result<String> {
    let fmt = if cli.json {
        OutputFormat::Json
    } else if cli.csv {
        OutputFormat::Csv
    } else {
        OutputFormat::Text
    };
    let out = match &cli.command {
        Command::Rate(a) => cmd_rate(a, fmt)?,
        Command::SweepSurface(a) => cmd_sweep_surface(a, fmt)?,
        Command::SweepDistance(a) => cmd_sweep_distance(a, fmt)?,
        Command::Feasible(a) => cmd_feasible(a, fmt)?,
        Command::Codes(a) => cmd_codes(a, fmt)?,
        Command::Simulate(a) => cmd_simulate(a, cli.seed.unwrap_or_else(os_seed), fmt)?,
        Command::Keygen(a) => cmd_keygen(a, cli.seed.unwrap_or_else(os_seed), fmt)?,
    };
    if let Some(path) = &cli.out {
        std::fs::write(path, &out)?;
        return Ok(String::new());
    }
    Ok(out)
}

/// Parses `args`, runs, and returns `(exit code, stdout, stderr)`.
pub fn run_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                (code, text, String::new())
            } else {
                (code, String::new(), text)
            };
        }
    };
    match run(&cli) {
        Ok(out) => (EXIT_OK, out, String::new()),
        Err(e) => (EXIT_DOMAIN, String::new(), format!("error: {e}\n")),
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (code, out, err) = run_args(args);
    print!("{out}");
    eprint!("{err}");
    code
}
