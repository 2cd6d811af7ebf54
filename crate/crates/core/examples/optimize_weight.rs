//! Weight-only and joint (p1, c1^2) optimization, and a coarse view of the
//! rate surface around the joint optimum.
//!
//! cargo run --example optimize_weight

use steep::model::{db_to_linear, linear_to_db};
use steep::optimizer::{optimize_c1, optimize_p1_c1, rate_surface, P1Window};

fn main() -> steep::Result<()> {
    let p2 = db_to_linear(20.0);
    let w = optimize_c1(db_to_linear(5.0), p2, 4.0, 4.0)?;
    println!("p1 = 5 dB: c1^2* = {:.5}, R_s* = {:.5}", w.c1_sq_star, w.rs_star);

    let j = optimize_p1_c1(p2, 4.0, 4.0, P1Window::default())?;
    let p1_db = linear_to_db(j.p1_star.unwrap());
    println!("joint: p1* = {:.3} dB, c1^2* = {:.5}, R_s* = {:.5}", p1_db, j.c1_sq_star, j.rs_star);

    let p1s: Vec<f64> = (-2..=2).map(|i| p1_db + 2.0 * i as f64).collect();
    let fr = [0.2, 0.4, 0.6, 0.8];
    let surf = rate_surface(p2, 4.0, 4.0, &p1s, &fr)?;
    print!("{:>8}", "p1 \\ f");
    for f in fr {
        print!("{f:>9.1}");
    }
    println!();
    for row in surf.chunks(fr.len()) {
        print!("{:>8.2}", row[0].p1_db);
        for p in row {
            print!("{:>9.4}", p.rs);
        }
        println!();
    }
    Ok(())
}
