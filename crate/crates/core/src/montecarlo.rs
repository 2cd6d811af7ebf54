//! Sample-level simulation of round trips and empirical MMSE estimates.
//!
//! The empirical estimators are the independent check on the closed forms
//! in [`crate::model`]: they never call them.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SteepError};
use crate::model::SystemParams;
use crate::rng::{ComplexGaussianStream, Substream, GENERATOR_VERSION};

/// Samples generated per parallel work unit.
pub const DEFAULT_CHUNK: usize = 1 << 16;
/// Minimum sample count for the model-moment estimators.
pub const MIN_SAMPLES: usize = 1_000;
/// Minimum sample count for the sample-covariance estimator.
pub const MIN_SAMPLES_SAMPLE_COV: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SessionTranscript {
    pub params: SystemParams,
    pub seed: u64,
    pub x1: Vec<Complex64>,
    pub w1: Vec<Complex64>,
    pub y1: Vec<Complex64>,
    pub s2: Vec<Complex64>,
    pub x2: Vec<Complex64>,
    pub w2: Vec<Complex64>,
    pub y2: Vec<Complex64>,
    pub v1: Vec<Complex64>,
    pub z1: Vec<Complex64>,
    pub v2: Vec<Complex64>,
    pub z2: Vec<Complex64>,
}

struct Chunk {
    x1: Vec<Complex64>,
    w1: Vec<Complex64>,
    s2: Vec<Complex64>,
    w2: Vec<Complex64>,
    v1: Vec<Complex64>,
    v2: Vec<Complex64>,
}

fn draw_chunk(params: &SystemParams, seed: u64, start: usize, len: usize) -> Chunk {
    let draw = |stream, var| ComplexGaussianStream::new(seed, stream, var, start as u64).take_vec(len);
    Chunk {
        x1: draw(Substream::Probe, 1.0),
        w1: draw(Substream::UserNoise1, params.sigma1_sq()),
        s2: draw(Substream::Secret, 1.0),
        w2: draw(Substream::UserNoise2, params.sigma2_sq()),
        v1: draw(Substream::EveNoise1, params.eps1_sq()),
        v2: draw(Substream::EveNoise2, params.eps2_sq()),
    }
}

pub fn simulate(params: &SystemParams, k: usize, seed: u64) -> Result<SessionTranscript> {
    simulate_chunked(params, k, seed, DEFAULT_CHUNK)
}

/// Same as [`simulate`] with an explicit work-unit size. The transcript does
/// not depend on `chunk`.
pub fn simulate_chunked(params: &SystemParams, k: usize, seed: u64, chunk: usize) -> Result<SessionTranscript> {
    if k == 0 {
        return Err(SteepError::Invalid("sample count K must be at least 1".into()));
    }
    if chunk == 0 {
        return Err(SteepError::Invalid("chunk size must be at least 1".into()));
    }
    let starts: Vec<usize> = (0..k).step_by(chunk).collect();
    let chunks: Vec<Chunk> = starts
        .par_iter()
        .map(|&s| draw_chunk(params, seed, s, chunk.min(k - s)))
        .collect();

    let mut t = SessionTranscript {
        params: *params,
        seed,
        x1: Vec::with_capacity(k),
        w1: Vec::with_capacity(k),
        y1: Vec::with_capacity(k),
        s2: Vec::with_capacity(k),
        x2: Vec::with_capacity(k),
        w2: Vec::with_capacity(k),
        y2: Vec::with_capacity(k),
        v1: Vec::with_capacity(k),
        z1: Vec::with_capacity(k),
        v2: Vec::with_capacity(k),
        z2: Vec::with_capacity(k),
    };
    for c in chunks {
        t.x1.extend(c.x1);
        t.w1.extend(c.w1);
        t.s2.extend(c.s2);
        t.w2.extend(c.w2);
        t.v1.extend(c.v1);
        t.v2.extend(c.v2);
    }
    let c1 = params.c1_sq().sqrt();
    let c2 = params.c2_sq().sqrt();
    for i in 0..k {
        let y1 = t.x1[i] + t.w1[i];
        let x2 = c1 * y1 + c2 * t.s2[i];
        t.y1.push(y1);
        t.x2.push(x2);
        t.y2.push(x2 + t.w2[i]);
        t.z1.push(t.x1[i] + t.v1[i]);
        t.z2.push(x2 + t.v2[i]);
    }
    Ok(t)
}

impl SessionTranscript {
    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x1.is_empty()
    }

    /// Phase-2 symbol rebuilt from the stored probe, noise and secret.
    pub fn recompute_x2(&self, i: usize) -> Complex64 {
        let c1 = self.params.c1_sq().sqrt();
        let c2 = self.params.c2_sq().sqrt();
        c1 * (self.x1[i] + self.w1[i]) + c2 * self.s2[i]
    }

    pub const CSV_COLUMNS: [&'static str; 11] = ["x1", "w1", "y1", "s2", "x2", "w2", "y2", "v1", "z1", "v2", "z2"];

    /// Writes the transcript as CSV.
    ///
    /// Leading `#` lines carry the format tag, generator version, seed and
    /// parameters; the header row is `k` followed by `<stream>_re,<stream>_im`
    /// for each stream in [`Self::CSV_COLUMNS`] order. Floats are written in
    /// shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let p = &self.params;
        writeln!(w, "# steep-transcript v1")?;
        writeln!(w, "# generator={GENERATOR_VERSION} seed={:#018x}", self.seed)?;
        writeln!(
            w,
            "# p1={} p2={} alpha1={} alpha2={} c1_sq={}",
            p.p1(),
            p.p2(),
            p.alpha1(),
            p.alpha2(),
            p.c1_sq()
        )?;
        let mut header = String::from("k");
        for c in Self::CSV_COLUMNS {
            header.push_str(&format!(",{c}_re,{c}_im"));
        }
        writeln!(w, "{header}")?;
        let cols = [&self.x1, &self.w1, &self.y1, &self.s2, &self.x2, &self.w2, &self.y2, &self.v1, &self.z1, &self.v2, &self.z2];
        let mut line = String::new();
        for i in 0..self.len() {
            line.clear();
            line.push_str(&i.to_string());
            for c in cols {
                line.push_str(&format!(",{},{}", c[i].re, c[i].im));
            }
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Empirical mean squared error with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseEstimate {
    pub mse: f64,
    /// Sample standard deviation of the per-sample squared error over `sqrt(K)`.
    pub std_err: f64,
    pub samples: usize,
}

impl MseEstimate {
    fn from_errors<I: Iterator<Item = f64>>(errors: I) -> Self {
        let mut n = 0usize;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for e in errors {
            n += 1;
            let delta = e - mean;
            mean += delta / n as f64;
            m2 += delta * (e - mean);
        }
        let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
        Self {
            mse: mean,
            std_err: (var / n as f64).sqrt(),
            samples: n,
        }
    }

    /// Distance from `reference` in standard errors.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.mse - reference).abs() / self.std_err
    }
}

fn require_samples(t: &SessionTranscript, min: usize) -> Result<()> {
    if t.len() < min {
        return Err(SteepError::Invalid(format!(
            "estimator needs at least {min} samples, transcript has {}",
            t.len()
        )));
    }
    Ok(())
}

/// Alice's scalar LMMSE from `y2 - c1*x1`, built from the model coefficients.
pub fn empirical_mse_user(t: &SessionTranscript) -> Result<MseEstimate> {
    require_samples(t, MIN_SAMPLES)?;
    let p = &t.params;
    let c1 = p.c1_sq().sqrt();
    let c2_sq = p.c2_sq();
    let gain = c2_sq.sqrt() / (c2_sq + p.c1_sq() * p.sigma1_sq() + p.sigma2_sq());
    Ok(MseEstimate::from_errors((0..t.len()).map(|i| {
        let dy = t.y2[i] - c1 * t.x1[i];
        (t.s2[i] - gain * dy).norm_sqr()
    })))
}

/// Eve's two-observation LMMSE weights from the model second moments:
/// `A = [[1+e1, c1], [c1, 1+e2]]`, cross-vector `[0, c2]`.
pub fn eve_lmmse_weights(p: &SystemParams) -> Result<[f64; 2]> {
    let c1 = p.c1_sq().sqrt();
    let c2 = p.c2_sq().sqrt();
    let a11 = 1.0 + p.eps1_sq();
    let a22 = 1.0 + p.eps2_sq();
    let det = a11 * a22 - p.c1_sq();
    if !(det > 1e-12 * a11 * a22) || !det.is_finite() {
        return Err(SteepError::Domain(format!("eavesdropper moment matrix is singular (det = {det:e})")));
    }
    Ok([-c1 * c2 / det, a11 * c2 / det])
}

pub fn empirical_mse_eve(t: &SessionTranscript) -> Result<MseEstimate> {
    require_samples(t, MIN_SAMPLES)?;
    let [w1, w2] = eve_lmmse_weights(&t.params)?;
    Ok(MseEstimate::from_errors(
        (0..t.len()).map(|i| (t.s2[i] - (w1 * t.z1[i] + w2 * t.z2[i])).norm_sqr()),
    ))
}

/// Eve's LMMSE with second moments estimated from the transcript itself.
pub fn empirical_mse_eve_sample_cov(t: &SessionTranscript) -> Result<MseEstimate> {
    require_samples(t, MIN_SAMPLES_SAMPLE_COV)?;
    let n = t.len() as f64;
    let (mut r11, mut r22, mut r12) = (0.0, 0.0, Complex64::new(0.0, 0.0));
    let (mut c1, mut c2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for i in 0..t.len() {
        let (z1, z2, s) = (t.z1[i], t.z2[i], t.s2[i]);
        r11 += z1.norm_sqr();
        r22 += z2.norm_sqr();
        r12 += z1 * z2.conj();
        c1 += s * z1.conj();
        c2 += s * z2.conj();
    }
    let (r11, r22, r12, c1, c2) = (r11 / n, r22 / n, r12 / n, c1 / n, c2 / n);
    // Czz = [[r11, r12], [conj(r12), r22]]
    let det = r11 * r22 - r12.norm_sqr();
    if !(det > 1e-12 * r11 * r22) {
        return Err(SteepError::Domain(format!("sample covariance is singular (det = {det:e})")));
    }
    // Row vector g = csz * Czz^-1, estimate s_hat = g . z
    let g1 = (c1 * r22 - c2 * r12.conj()) / det;
    let g2 = (c2 * r11 - c1 * r12) / det;
    Ok(MseEstimate::from_errors(
        (0..t.len()).map(|i| (t.s2[i] - (g1 * t.z1[i] + g2 * t.z2[i])).norm_sqr()),
    ))
}

/// Empirical secrecy rate from the two model-moment estimators.
pub fn empirical_secrecy_rate(t: &SessionTranscript) -> Result<f64> {
    Ok(empirical_mse_eve(t)?.mse.log2() - empirical_mse_user(t)?.mse.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::db_to_linear;

    fn reference_point() -> SystemParams {
        SystemParams::new(db_to_linear(5.0), 100.0, 4.0, 4.0, 0.3776).unwrap()
    }

    #[test]
    fn deterministic_and_chunk_invariant() {
        let p = reference_point();
        let a = simulate(&p, 5_000, 99).unwrap();
        let b = simulate(&p, 5_000, 99).unwrap();
        assert_eq!(a, b);
        let c = simulate_chunked(&p, 5_000, 99, 7).unwrap();
        assert_eq!(a, c);
        let d = simulate(&p, 5_000, 100).unwrap();
        assert_ne!(a.x1, d.x1);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(simulate(&reference_point(), 0, 1).is_err());
    }

    #[test]
    fn stored_echo_recomputes_exactly() {
        let t = simulate(&reference_point(), 1_000, 5).unwrap();
        for i in 0..t.len() {
            assert_eq!(t.x2[i], t.recompute_x2(i));
            assert_eq!(t.y1[i], t.x1[i] + t.w1[i]);
            assert_eq!(t.z2[i], t.x2[i] + t.v2[i]);
        }
    }

    #[test]
    fn noiseless_echo_channel() {
        let p = SystemParams::new(db_to_linear(5.0), f64::INFINITY, 4.0, 4.0, 0.3).unwrap();
        let t = simulate(&p, 1_000, 1).unwrap();
        assert_eq!(t.y2, t.x2);
    }

    #[test]
    fn noiseless_user_recovers_secret() {
        let p = SystemParams::new(f64::INFINITY, f64::INFINITY, 4.0, 4.0, 0.3).unwrap();
        let t = simulate(&p, 2_000, 3).unwrap();
        assert!(empirical_mse_user(&t).unwrap().mse < 1e-20);
    }

    #[test]
    fn deaf_eve_estimate_near_one() {
        let p = SystemParams::new(db_to_linear(5.0), 100.0, 1e-9, 1e-9, 0.3).unwrap();
        let t = simulate(&p, 20_000, 3).unwrap();
        let e = empirical_mse_eve(&t).unwrap();
        assert!((e.mse - 1.0).abs() < 5.0 * e.std_err + 1e-6, "{e:?}");
    }

    #[test]
    fn small_transcripts_rejected_by_estimators() {
        let t = simulate(&reference_point(), 999, 1).unwrap();
        assert!(empirical_mse_user(&t).is_err());
        assert!(empirical_mse_eve(&t).is_err());
        let t = simulate(&reference_point(), 5_000, 1).unwrap();
        assert!(empirical_mse_eve_sample_cov(&t).is_err());
    }

    #[test]
    fn csv_dump_layout() {
        let t = simulate(&reference_point(), 3, 0xabc).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# steep-transcript v1");
        assert!(lines[1].contains("seed=0x0000000000000abc"));
        assert!(lines[3].starts_with("k,x1_re,x1_im,w1_re"));
        assert_eq!(lines[3].split(',').count(), 23);
        assert_eq!(lines.len(), 7);
        let first: Vec<&str> = lines[4].split(',').collect();
        assert_eq!(first[1].parse::<f64>().unwrap(), t.x1[0].re);
    }
}
