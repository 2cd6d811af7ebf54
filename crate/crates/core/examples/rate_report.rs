//! Closed-form MSEs, capacities and secrecy rate at one operating point,
//! then the same point with the weight optimized.
//!
//! cargo run --example rate_report

use steep::model::{db_to_linear, GeometryParams};
use steep::optimizer::optimize_c1;
use steep::{secrecy_report, SystemParams};

fn main() -> steep::Result<()> {
    let geom = GeometryParams::worst_case(0.5)?;
    let params = SystemParams::from_db_geometry(5.0, 20.0, &geom, 0.3776)?;
    let r = secrecy_report(&params)?;
    println!("alpha1 = {}, alpha2 = {}", params.alpha1(), params.alpha2());
    println!("MSE_U = {:.4}  MSE_E = {:.4}", r.mse_user, r.mse_eve);
    println!("C_U   = {:.4}  C_E   = {:.4}", r.cap_user, r.cap_eve);
    println!("R_s   = {:.4} bits per round-trip sample", r.rs);

    let (a1, a2) = geom.eve_advantages();
    let best = optimize_c1(db_to_linear(5.0), db_to_linear(20.0), a1, a2)?;
    println!("optimized c1^2 = {:.4} gives R_s = {:.5}", best.c1_sq_star, best.rs_star);
    Ok(())
}
