//! Privacy amplification of two opposite-direction session payloads into a
//! final key, and the end-to-end key generation run.

use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coding::{reliable_capacity_gate, CodePair, CodeRate};
use crate::error::{Result, SteepError};
use crate::model::{secrecy_report, GeometryParams, SecrecyReport, SystemParams};
use crate::montecarlo::{empirical_mse_eve, empirical_mse_user, simulate, MseEstimate, MIN_SAMPLES};
use crate::optimizer::{averaged_rate_with_weight, default_d_grid, design_weight};
use crate::rng::{derive_seed, random_bits, Substream, GENERATOR_VERSION};

/// Which node transmits the probe in phase 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AliceFirst,
    BobFirst,
}

/// Bits reliably delivered in phase 2 of one session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionPayload {
    pub bits: Vec<bool>,
    pub direction: Direction,
}

impl SessionPayload {
    pub fn new(bits: Vec<bool>, direction: Direction) -> Result<Self> {
        if bits.is_empty() {
            return Err(SteepError::Invalid("session payload is empty".into()));
        }
        Ok(Self { bits, direction })
    }
}

/// Public 256-bit randomness selecting one Toeplitz hash from the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashSeed(pub [u8; 32]);

impl HashSeed {
    pub fn from_os() -> Self {
        let mut b = [0u8; 32];
        getrandom::getrandom(&mut b).expect("OS entropy source unavailable");
        Self(b)
    }

    /// Deterministic hash seed derived from a 64-bit seed.
    pub fn from_u64(seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(Substream::HashSeed as u64);
        let mut b = [0u8; 32];
        rng.fill_bytes(&mut b);
        Self(b)
    }
}

impl fmt::Display for HashSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl FromStr for HashSeed {
    type Err = SteepError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches("0x");
        let bytes = hex::decode(s).map_err(|e| SteepError::Invalid(format!("hash seed: {e}")))?;
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|b: Vec<u8>| SteepError::Invalid(format!("hash seed must be 32 bytes, got {}", b.len())))?;
        Ok(Self(arr))
    }
}

impl Serialize for HashSeed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HashSeed {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecretKey {
    #[serde(serialize_with = "ser_bits", deserialize_with = "de_bits")]
    pub bits: Vec<bool>,
    pub hash_seed: HashSeed,
    /// Averaged secrecy rate used to size the key, when sized by [`key_length`].
    pub declared_rate: Option<f64>,
}

fn ser_bits<S: Serializer>(bits: &[bool], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
}

fn de_bits<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<bool>, D::Error> {
    let s = String::deserialize(d)?;
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(serde::de::Error::custom("key bits must be 0/1")),
        })
        .collect()
}

impl SecretKey {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Lowercase hex, first bit as the MSB of the first byte; the last byte
    /// is zero-padded when the length is not a multiple of 8.
    pub fn to_hex(&self) -> String {
        hex::encode(pack_msb_bytes(&self.bits))
    }
}

fn pack_msb_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i))))
        .collect()
}

/// `floor(2 K rbar)`: the largest key the averaged rate supports.
pub fn key_length(k: usize, rbar: f64) -> usize {
    if !(rbar > 0.0) {
        return 0;
    }
    ((2 * k) as f64 * rbar).floor() as usize
}

/// Binary Toeplitz matrix with `rows` rows and `cols` columns, stored as
/// its `rows + cols - 1` defining bits: `T[i][j] = diag[i + cols - 1 - j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzHash {
    rows: usize,
    cols: usize,
    diag: Vec<u64>,
}

impl ToeplitzHash {
    pub fn from_seed(seed: &HashSeed, rows: usize, cols: usize) -> Self {
        let nbits = (rows + cols).saturating_sub(1);
        let mut rng = ChaCha20Rng::from_seed(seed.0);
        rng.set_stream(Substream::HashSeed as u64);
        let words = nbits.div_ceil(64);
        let mut diag: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        if nbits % 64 != 0 {
            let last = diag.len() - 1;
            diag[last] &= (1u64 << (nbits % 64)) - 1;
        }
        diag.push(0);
        Self { rows, cols, diag }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn diag_bit(&self, idx: usize) -> bool {
        (self.diag[idx / 64] >> (idx % 64)) & 1 == 1
    }

    /// Matrix entry `T[i][j]`.
    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.diag_bit(i + self.cols - 1 - j)
    }

    /// 64 defining bits starting at bit `start`.
    fn window_word(&self, start: usize) -> u64 {
        let (w, s) = (start / 64, start % 64);
        let lo = self.diag.get(w).copied().unwrap_or(0) >> s;
        if s == 0 {
            lo
        } else {
            lo | self.diag.get(w + 1).copied().unwrap_or(0) << (64 - s)
        }
    }

    /// `T x` over GF(2).
    pub fn apply(&self, input: &[bool]) -> Result<Vec<bool>> {
        if input.len() != self.cols {
            return Err(SteepError::LengthMismatch {
                left: input.len(),
                right: self.cols,
            });
        }
        // Row i is the dot product of the reversed input with the defining
        // bits starting at i.
        let mut rev = vec![0u64; self.cols.div_ceil(64)];
        for (jr, &b) in input.iter().rev().enumerate() {
            if b {
                rev[jr / 64] |= 1 << (jr % 64);
            }
        }
        Ok((0..self.rows)
            .map(|i| {
                let ones: u32 = rev
                    .iter()
                    .enumerate()
                    .map(|(w, &x)| (self.window_word(i + 64 * w) & x).count_ones())
                    .sum();
                ones % 2 == 1
            })
            .collect())
    }
}

/// Compresses the concatenation `d1 || d2` to `out_len` bits with the
/// Toeplitz hash selected by `hash_seed`.
///
/// Both payloads must come from consecutive sessions so the eavesdropper
/// position is the same in both; the caller is responsible for that.
pub fn amplify(d1: &SessionPayload, d2: &SessionPayload, out_len: usize, hash_seed: &HashSeed) -> Result<SecretKey> {
    if d1.bits.len() != d2.bits.len() {
        return Err(SteepError::LengthMismatch {
            left: d1.bits.len(),
            right: d2.bits.len(),
        });
    }
    let n = d1.bits.len() + d2.bits.len();
    if out_len > n {
        return Err(SteepError::OutputTooLong {
            requested: out_len,
            available: n,
        });
    }
    let input: Vec<bool> = d1.bits.iter().chain(&d2.bits).copied().collect();
    let bits = ToeplitzHash::from_seed(hash_seed, out_len, n).apply(&input)?;
    Ok(SecretKey {
        bits,
        hash_seed: *hash_seed,
        declared_rate: None,
    })
}

/// Code rate and constellation used for the phase-2 payloads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeChoice {
    pub rate: CodeRate,
    pub m: u64,
}

impl CodeChoice {
    /// Payload bits carried by `k` symbols: `floor(k R log2 M)`.
    pub fn payload_bits(&self, k: usize) -> usize {
        let bits = self.m.trailing_zeros() as u128;
        (k as u128 * self.rate.num as u128 * bits / self.rate.den as u128) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeygenScenario {
    pub p1: f64,
    pub p2: f64,
    pub geometry: GeometryParams,
    /// Eve position the weight is designed for.
    pub d0: f64,
    /// Round trips per session.
    pub k: usize,
    pub code: CodeChoice,
    /// Fixed weight; designed at `d0` when absent.
    pub c1_sq: Option<f64>,
    pub seed: u64,
    pub hash_seed: HashSeed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub direction: Direction,
    pub alpha1: f64,
    pub alpha2: f64,
    pub analytic: SecrecyReport,
    pub empirical_mse_user: Option<MseEstimate>,
    pub empirical_mse_eve: Option<MseEstimate>,
    /// Legitimate receiver can decode the payload.
    pub legit_gate: bool,
    /// Eve could also decode it (diagnostic only).
    pub eve_gate: bool,
    pub payload_bits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeygenReport {
    pub generator: String,
    pub seed: u64,
    pub hash_seed: HashSeed,
    pub c1_sq: f64,
    /// Minimum averaged rate over Eve positions, used to size the key.
    pub rs_bar_worst: f64,
    pub worst_case_d: f64,
    pub key_length: usize,
    pub sessions: [SessionRecord; 2],
    pub success: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeygenRun {
    pub report: KeygenReport,
    pub key: Option<SecretKey>,
    pub key_hex: Option<String>,
}

fn run_session(
    scenario: &KeygenScenario,
    c1_sq: f64,
    direction: Direction,
    advantages: (f64, f64),
    session_seed: u64,
) -> Result<(SessionRecord, Vec<bool>)> {
    let params = SystemParams::new(scenario.p1, scenario.p2, advantages.0, advantages.1, c1_sq)?;
    let analytic = secrecy_report(&params)?;
    let transcript = simulate(&params, scenario.k, session_seed)?;
    let (emp_u, emp_e) = if scenario.k >= MIN_SAMPLES {
        (Some(empirical_mse_user(&transcript)?), Some(empirical_mse_eve(&transcript)?))
    } else {
        (None, None)
    };
    let pair = CodePair::new(scenario.code.rate, scenario.code.m, analytic.cap_user, analytic.cap_eve)?;
    let n = scenario.code.payload_bits(scenario.k);
    let bits = random_bits(session_seed, Substream::Payload, n);
    Ok((
        SessionRecord {
            direction,
            alpha1: advantages.0,
            alpha2: advantages.1,
            analytic,
            empirical_mse_user: emp_u,
            empirical_mse_eve: emp_e,
            legit_gate: reliable_capacity_gate(&pair, analytic.cap_user),
            eve_gate: reliable_capacity_gate(&pair, analytic.cap_eve),
            payload_bits: n,
        },
        bits,
    ))
}

/// Runs both opposite-direction sessions, gates the payloads, sizes the key
/// from the worst-case averaged rate and hashes the payloads into it.
///
/// Gates use the analytic effective capacities; the simulated transcripts
/// contribute empirical MSEs to the report.
pub fn end_to_end_keygen(scenario: &KeygenScenario) -> Result<KeygenRun> {
    if scenario.k == 0 {
        return Err(SteepError::Invalid("K must be at least 1".into()));
    }
    let g = &scenario.geometry;
    let (ple, eta) = (g.path_loss_exponent(), g.eta());
    let c1_sq = match scenario.c1_sq {
        Some(c) => c,
        None => design_weight(scenario.d0, scenario.p1, scenario.p2, ple, eta)?,
    };

    let mut worst = (f64::INFINITY, scenario.d0);
    let mut grid = default_d_grid();
    grid.push(scenario.d0);
    for d in grid {
        let r = averaged_rate_with_weight(c1_sq, d, scenario.p1, scenario.p2, ple, eta)?.rs_bar;
        if r < worst.0 {
            worst = (r, d);
        }
    }

    let (a1, a2) = g.eve_advantages();
    let (fwd, bits_fwd) = run_session(scenario, c1_sq, Direction::AliceFirst, (a1, a2), derive_seed(scenario.seed, 0))?;
    let (rev, bits_rev) = run_session(scenario, c1_sq, Direction::BobFirst, (a2, a1), derive_seed(scenario.seed, 1))?;

    let key_len = key_length(scenario.k, worst.0).min(bits_fwd.len() + bits_rev.len());
    let failure = if !fwd.legit_gate || !rev.legit_gate {
        Some(format!(
            "legitimate receiver cannot decode: R log2 M = {:.4} vs C_U = {:.4} (alice_first), {:.4} (bob_first)",
            scenario.code.rate.value() * scenario.code.m.trailing_zeros() as f64,
            fwd.analytic.cap_user,
            rev.analytic.cap_user
        ))
    } else if bits_fwd.is_empty() {
        Some("code choice carries no payload bits at this K".into())
    } else {
        None
    };

    let key = match failure {
        None => {
            let d1 = SessionPayload::new(bits_fwd, Direction::AliceFirst)?;
            let d2 = SessionPayload::new(bits_rev, Direction::BobFirst)?;
            let mut key = amplify(&d1, &d2, key_len, &scenario.hash_seed)?;
            key.declared_rate = Some(worst.0);
            Some(key)
        }
        Some(_) => None,
    };

    Ok(KeygenRun {
        report: KeygenReport {
            generator: GENERATOR_VERSION.into(),
            seed: scenario.seed,
            hash_seed: scenario.hash_seed,
            c1_sq,
            rs_bar_worst: worst.0,
            worst_case_d: worst.1,
            key_length: if key.is_some() { key_len } else { 0 },
            sessions: [fwd, rev],
            success: key.is_some(),
            failure,
        },
        key_hex: key.as_ref().map(SecretKey::to_hex),
        key,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_toeplitz(h: &ToeplitzHash, x: &[bool]) -> Vec<bool> {
        (0..h.rows())
            .map(|i| (0..h.cols()).fold(false, |acc, j| acc ^ (h.entry(i, j) & x[j])))
            .collect()
    }

    #[test]
    fn key_length_examples() {
        assert_eq!(key_length(10_000, 0.164), 3280);
        assert_eq!(key_length(10_000, 0.0), 0);
        assert_eq!(key_length(3, 1.0 / 3.0), 2);
        assert_eq!(key_length(5, -0.1), 0);
    }

    #[test]
    fn toeplitz_structure() {
        let h = ToeplitzHash::from_seed(&HashSeed([9; 32]), 5, 7);
        for i in 1..5 {
            for j in 1..7 {
                assert_eq!(h.entry(i, j), h.entry(i - 1, j - 1));
            }
        }
    }

    #[test]
    fn packed_product_matches_naive() {
        for (rows, cols, s) in [(1, 1, 1u64), (3, 64, 2), (70, 130, 3), (64, 64, 4), (129, 300, 5)] {
            let h = ToeplitzHash::from_seed(&HashSeed::from_u64(s), rows, cols);
            let x = random_bits(s, Substream::Payload, cols);
            assert_eq!(h.apply(&x).unwrap(), naive_toeplitz(&h, &x), "{rows}x{cols}");
        }
    }

    #[test]
    fn zero_input_gives_zero_key() {
        let d = SessionPayload::new(vec![false; 100], Direction::AliceFirst).unwrap();
        let e = SessionPayload::new(vec![false; 100], Direction::BobFirst).unwrap();
        let k = amplify(&d, &e, 40, &HashSeed::from_u64(1)).unwrap();
        assert!(k.bits.iter().all(|b| !b));
        assert_eq!(k.len(), 40);
    }

    #[test]
    fn amplify_errors() {
        let d = SessionPayload::new(vec![true; 10], Direction::AliceFirst).unwrap();
        let e = SessionPayload::new(vec![true; 11], Direction::BobFirst).unwrap();
        assert!(matches!(amplify(&d, &e, 4, &HashSeed([0; 32])), Err(SteepError::LengthMismatch { .. })));
        let e = SessionPayload::new(vec![true; 10], Direction::BobFirst).unwrap();
        assert!(matches!(amplify(&d, &e, 21, &HashSeed([0; 32])), Err(SteepError::OutputTooLong { .. })));
        assert!(SessionPayload::new(vec![], Direction::AliceFirst).is_err());
    }

    #[test]
    fn single_bit_flip_follows_matrix_column() {
        let seed = HashSeed::from_u64(77);
        let x = random_bits(1, Substream::Payload, 200);
        let d1 = SessionPayload::new(x[..100].to_vec(), Direction::AliceFirst).unwrap();
        let d2 = SessionPayload::new(x[100..].to_vec(), Direction::BobFirst).unwrap();
        let base = amplify(&d1, &d2, 24, &seed).unwrap();
        let h = ToeplitzHash::from_seed(&seed, 24, 200);
        for j in [0usize, 57, 99, 100, 199] {
            let mut y = x.clone();
            y[j] = !y[j];
            let k = amplify(
                &SessionPayload::new(y[..100].to_vec(), Direction::AliceFirst).unwrap(),
                &SessionPayload::new(y[100..].to_vec(), Direction::BobFirst).unwrap(),
                24,
                &seed,
            )
            .unwrap();
            let diff: Vec<bool> = base.bits.iter().zip(&k.bits).map(|(a, b)| a ^ b).collect();
            let column: Vec<bool> = (0..24).map(|i| h.entry(i, j)).collect();
            assert_eq!(diff, column);
        }
    }

    #[test]
    fn hash_seed_hex_roundtrip() {
        let s = HashSeed::from_u64(5);
        let text = s.to_string();
        assert_eq!(text.len(), 64);
        assert_eq!(text.parse::<HashSeed>().unwrap(), s);
        assert!("abcd".parse::<HashSeed>().is_err());
        assert!("zz".repeat(32).parse::<HashSeed>().is_err());
    }

    #[test]
    fn key_hex_is_msb_first() {
        let k = SecretKey {
            bits: vec![true, false, false, false, false, false, false, true, true],
            hash_seed: HashSeed([0; 32]),
            declared_rate: None,
        };
        assert_eq!(k.to_hex(), "8180");
    }

    #[test]
    fn payload_bits_exact() {
        let c = CodeChoice {
            rate: CodeRate::new(1, 4).unwrap(),
            m: 512,
        };
        assert_eq!(c.payload_bits(10_000), 22_500);
        assert_eq!(c.payload_bits(3), 6);
    }

    #[test]
    fn zero_round_trips_rejected() {
        let s = KeygenScenario {
            p1: 3.0,
            p2: 100.0,
            geometry: GeometryParams::worst_case(0.5).unwrap(),
            d0: 0.5,
            k: 0,
            code: CodeChoice {
                rate: CodeRate::new(1, 4).unwrap(),
                m: 512,
            },
            c1_sq: Some(0.3),
            seed: 1,
            hash_seed: HashSeed([0; 32]),
        };
        assert!(end_to_end_keygen(&s).is_err());
    }
}
