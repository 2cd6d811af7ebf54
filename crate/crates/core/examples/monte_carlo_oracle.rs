//! Simulates the two-phase exchange and compares empirical MMSEs with the
//! closed forms. Optionally dumps the transcript.
//!
//! cargo run --release --example monte_carlo_oracle -- [K] [transcript.csv]

use std::fs::File;
use std::io::BufWriter;

use steep::montecarlo::{empirical_mse_eve, empirical_mse_eve_sample_cov, empirical_mse_user, simulate};
use steep::model::{db_to_linear, GeometryParams};
use steep::{secrecy_report, SystemParams};

fn main() -> steep::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().map(|s| s.parse().expect("K must be an integer")).unwrap_or(1_000_000);
    let (a1, a2) = GeometryParams::worst_case(0.5)?.eve_advantages();
    let params = SystemParams::new(db_to_linear(5.0), db_to_linear(20.0), a1, a2, 0.3776)?;
    let analytic = secrecy_report(&params)?;
    let t = simulate(&params, k, 0x5eed)?;

    let mu = empirical_mse_user(&t)?;
    let me = empirical_mse_eve(&t)?;
    let sc = empirical_mse_eve_sample_cov(&t)?;
    println!("K = {k}, seed = {:#x}", t.seed);
    println!("MSE_U analytic {:.5}  empirical {:.5} +/- {:.1e}  z = {:.2}", analytic.mse_user, mu.mse, mu.std_err, mu.z_score(analytic.mse_user));
    println!("MSE_E analytic {:.5}  empirical {:.5} +/- {:.1e}  z = {:.2}", analytic.mse_eve, me.mse, me.std_err, me.z_score(analytic.mse_eve));
    println!("MSE_E from sample covariances {:.5}", sc.mse);

    if let Some(path) = args.next() {
        t.write_csv(BufWriter::new(File::create(&path)?))?;
        println!("transcript written to {path}");
    }
    Ok(())
}
