//! Secrecy-rate analysis and key distillation for echoed-probe round trips
//! over Gaussian channels.
//!
//! In each round trip Alice sends a random probe, and Bob echoes a weighted
//! mix of the noisy probe and a secret symbol. Alice cancels the probe she
//! knows, but an eavesdropper only hears both legs through noise. The crate
//! covers:
//!
//! - [`model`]: closed-form MMSEs, effective capacities and secrecy rate
//! - [`feasibility`]: positivity thresholds and feasible-region grids
//! - [`optimizer`]: best combining weight / probe power, averaged rate, sweeps
//! - [`montecarlo`]: sample-level simulation and empirical MMSE oracles
//! - [`coding`]: code rate / constellation selection between the capacities
//! - [`privacy`]: Toeplitz-hash privacy amplification and end-to-end key generation
//! - [`cli`]: the `steep` command-line front end
//!
//! ```
//! use steep::model::{db_to_linear, secrecy_report, GeometryParams, SystemParams};
//!
//! let geom = GeometryParams::worst_case(0.5).unwrap();
//! let params = SystemParams::from_db_geometry(5.0, 20.0, &geom, 0.3776).unwrap();
//! let report = secrecy_report(&params).unwrap();
//! assert!((report.rs - 0.164).abs() < 1e-3);
//! # let _ = db_to_linear(0.0);
//! ```

pub mod cli;
pub mod coding;
pub mod error;
pub mod feasibility;
pub mod model;
pub mod montecarlo;
pub mod optimizer;
pub mod privacy;
pub mod rng;
pub mod search;

pub use error::{Result, SteepError};
pub use model::{secrecy_report, GeometryParams, SecrecyReport, SystemParams};
