//! Rates versus eavesdropper position: a fixed weight designed at d0 = 0.5
//! and the per-position joint optimum. Writes both sweeps as CSV.
//!
//! cargo run --example distance_sweep -- fixed.csv joint.csv

use std::fs::File;

use steep::optimizer::{sweep_distance, SweepConfig};

fn main() -> steep::Result<()> {
    let mut args = std::env::args().skip(1);
    let fixed_path = args.next().unwrap_or_else(|| "fixed.csv".into());
    let joint_path = args.next().unwrap_or_else(|| "joint.csv".into());

    let fixed = sweep_distance(&SweepConfig::fixed_weight_default())?;
    let joint = sweep_distance(&SweepConfig::joint_default())?;
    fixed.write_csv(File::create(&fixed_path)?)?;
    joint.write_csv(File::create(&joint_path)?)?;

    let cutoff = fixed.records.iter().find(|r| r.rs_hat_plus > 0.0).map(|r| r.d);
    let worst = fixed.records.iter().min_by(|a, b| a.rs_bar.total_cmp(&b.rs_bar)).unwrap();
    println!("fixed weight c1^2 = {:.4}", fixed.records[0].c1_sq_star);
    println!("one-way rate becomes positive at d = {cutoff:?}");
    println!("averaged rate is smallest at d = {:.2}: {:.5}", worst.d, worst.rs_bar);
    for r in joint.records.iter().filter(|r| [0.25, 0.5, 0.75].iter().any(|d| (r.d - d).abs() < 1e-9)) {
        println!("joint d = {:.2}: p1* = {:6.2} dB, c1^2* = {:.4}, R_s* = {:.4}", r.d, r.p1_star_db, r.c1_sq_star, r.rs_star);
    }
    println!("wrote {fixed_path} and {joint_path}");
    Ok(())
}
