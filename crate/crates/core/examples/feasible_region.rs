//! Where is a positive secrecy rate possible? Prints the p2 thresholds and
//! writes the (p1, p2) feasibility matrix as CSV.
//!
//! cargo run --example feasible_region > region.csv

use steep::feasibility::{feasible_region, is_feasible, p2_threshold_best_c1, p2_threshold_given_c1, AxisSpec, FixedPair};
use steep::model::{db_to_linear, linear_to_db};

fn main() -> steep::Result<()> {
    let p1 = db_to_linear(5.0);
    let t_fixed = p2_threshold_given_c1(p1, 4.0, 4.0, 0.3776)?;
    let t_best = p2_threshold_best_c1(p1, 4.0, 4.0);
    eprintln!("p2 threshold at c1^2 = 0.3776: {:.2} ({:.2} dB)", t_fixed, linear_to_db(t_fixed));
    eprintln!("p2 threshold at the best c1^2: {:.3} ({:.2} dB)", t_best, linear_to_db(t_best));
    eprintln!("feasible at p2 = 20 dB: {}", is_feasible(p1, 100.0, 4.0, 4.0));

    let axis = AxisSpec::db(-10.0, 40.0, 51);
    let grid = feasible_region(FixedPair::Advantages { alpha1: 4.0, alpha2: 4.0 }, &axis, &axis)?;
    eprintln!("{} of {} grid points feasible", grid.feasible_count(), 51 * 51);
    grid.write_csv(std::io::stdout().lock())
}
