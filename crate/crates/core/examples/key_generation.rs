//! Two opposite-direction sessions, capacity gates and Toeplitz privacy
//! amplification into a shared key.
//!
//! cargo run --release --example key_generation

use steep::coding::CodeRate;
use steep::model::{db_to_linear, GeometryParams};
use steep::privacy::{end_to_end_keygen, CodeChoice, HashSeed, KeygenScenario};

fn main() -> steep::Result<()> {
    let scenario = KeygenScenario {
        p1: db_to_linear(5.0),
        p2: db_to_linear(20.0),
        geometry: GeometryParams::worst_case(0.5)?,
        d0: 0.5,
        k: 10_000,
        code: CodeChoice {
            rate: CodeRate::new(1, 4)?,
            m: 512,
        },
        c1_sq: Some(0.3776),
        seed: 0x5eed,
        hash_seed: HashSeed::from_u64(1),
    };
    let run = end_to_end_keygen(&scenario)?;
    let r = &run.report;
    println!("hash seed {}", r.hash_seed);
    println!("worst-case averaged rate {:.5} at d = {:.2}", r.rs_bar_worst, r.worst_case_d);
    for s in &r.sessions {
        println!(
            "{:?}: payload {} bits, user decodes {}, eve decodes {}",
            s.direction, s.payload_bits, s.legit_gate, s.eve_gate
        );
    }
    match &run.key_hex {
        Some(hex) => println!("{}-bit key: {}...", r.key_length, &hex[..32]),
        None => println!("no key: {}", r.failure.as_deref().unwrap_or("unknown")),
    }
    Ok(())
}
