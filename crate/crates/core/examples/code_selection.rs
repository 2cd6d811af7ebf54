//! Code-rate and constellation pairs that let the legitimate receiver
//! decode while keeping the eavesdropper below capacity.
//!
//! cargo run --example code_selection

use steep::coding::{reliable_capacity_gate, select_pairs, standard_rates, DEFAULT_M_MAX};

fn main() -> steep::Result<()> {
    let (cu, ce) = (2.289, 2.125);
    let pairs = select_pairs(cu, ce, &standard_rates(), DEFAULT_M_MAX)?;
    println!("C_U = {cu}, C_E = {ce}");
    for p in &pairs {
        println!(
            "R = {:>4}, M = {:>4}: C_E/R = {:.3} < log2 M = {} < C_U/R = {:.3}, user decodes: {}, eve decodes: {}",
            p.rate.to_string(),
            p.m,
            p.interval_lo,
            p.bits_per_symbol,
            p.interval_hi,
            reliable_capacity_gate(p, cu),
            reliable_capacity_gate(p, ce)
        );
    }
    Ok(())
}
