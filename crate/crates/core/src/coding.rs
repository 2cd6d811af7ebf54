//! Choice of a code rate and QAM order whose spectral efficiency the
//! legitimate receiver can support but the eavesdropper cannot.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SteepError};

/// Exact code rate `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CodeRate {
    pub num: u32,
    pub den: u32,
}

impl CodeRate {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(SteepError::Invalid(format!("code rate {num}/{den} must lie in (0, 1]")));
        }
        Ok(Self { num, den })
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `cap / R`, computed as `cap * den / num`.
    pub fn divide(&self, cap: f64) -> f64 {
        cap * self.den as f64 / self.num as f64
    }
}

impl fmt::Display for CodeRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl std::str::FromStr for CodeRate {
    type Err = SteepError;

    fn from_str(s: &str) -> Result<Self> {
        let (n, d) = s
            .split_once('/')
            .ok_or_else(|| SteepError::Invalid(format!("code rate `{s}` is not of the form a/b")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| SteepError::Invalid(format!("code rate `{s}` is not of the form a/b")))
        };
        CodeRate::new(parse(n)?, parse(d)?)
    }
}

/// Rates of common published LDPC families (DVB-S2, 5G NR, WiFi, CCSDS).
pub fn standard_rates() -> Vec<CodeRate> {
    [(1, 4), (1, 3), (2, 5), (1, 2), (3, 5), (2, 3), (3, 4), (4, 5), (5, 6), (8, 9), (9, 10)]
        .into_iter()
        .map(|(n, d)| CodeRate { num: n, den: d })
        .collect()
}

pub const DEFAULT_M_MAX: u64 = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodePair {
    pub rate: CodeRate,
    /// Constellation size, a power of two.
    pub m: u64,
    pub bits_per_symbol: u32,
    /// `C_E / R`
    pub interval_lo: f64,
    /// `C_U / R`
    pub interval_hi: f64,
    /// `log2 M - C_E / R`
    pub lower_margin: f64,
    /// `C_U / R - log2 M`
    pub upper_margin: f64,
}

impl CodePair {
    pub fn new(rate: CodeRate, m: u64, cap_user: f64, cap_eve: f64) -> Result<Self> {
        if m < 2 || !m.is_power_of_two() {
            return Err(SteepError::Invalid(format!("constellation size {m} is not a power of two >= 2")));
        }
        let bits = m.trailing_zeros();
        let lo = rate.divide(cap_eve);
        let hi = rate.divide(cap_user);
        Ok(Self {
            rate,
            m,
            bits_per_symbol: bits,
            interval_lo: lo,
            interval_hi: hi,
            lower_margin: bits as f64 - lo,
            upper_margin: hi - bits as f64,
        })
    }

    pub fn min_margin(&self) -> f64 {
        self.lower_margin.min(self.upper_margin)
    }

    /// Information bits per channel use, `R * log2 M`.
    pub fn spectral_efficiency(&self) -> f64 {
        self.rate.value() * self.bits_per_symbol as f64
    }
}

/// All pairs with `C_E/R < log2 M < C_U/R` and `M <= m_max`, best first.
///
/// Ranked by descending minimum margin; ties break on rate, then `M`.
pub fn select_pairs(cap_user: f64, cap_eve: f64, rates: &[CodeRate], m_max: u64) -> Result<Vec<CodePair>> {
    if !(cap_user > cap_eve) {
        return Err(SteepError::NoCapacityGap { cap_user, cap_eve });
    }
    if rates.is_empty() {
        return Err(SteepError::Invalid("rate list is empty".into()));
    }
    if m_max < 2 {
        return Err(SteepError::Invalid(format!("m_max = {m_max} must be at least 2")));
    }
    let max_bits = 63 - m_max.leading_zeros();
    let mut rates = rates.to_vec();
    rates.sort();
    rates.dedup();

    let mut out = Vec::new();
    for rate in rates {
        let lo = rate.divide(cap_eve);
        let hi = rate.divide(cap_user);
        for bits in 1..=max_bits {
            let b = bits as f64;
            if lo < b && b < hi {
                out.push(CodePair::new(rate, 1u64 << bits, cap_user, cap_eve)?);
            }
        }
    }
    out.sort_by(|a, b| {
        b.min_margin()
            .total_cmp(&a.min_margin())
            .then(a.rate.cmp(&b.rate))
            .then(a.m.cmp(&b.m))
    });
    Ok(out)
}

/// A receiver with effective capacity `cap` decodes the pair iff `R log2 M < cap`.
pub fn reliable_capacity_gate(pair: &CodePair, cap: f64) -> bool {
    // log2 M < cap / R, kept in the rate's exact form.
    (pair.bits_per_symbol as f64) < pair.rate.divide(cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_parsing() {
        assert_eq!("3/4".parse::<CodeRate>().unwrap(), CodeRate { num: 3, den: 4 });
        assert!("0/4".parse::<CodeRate>().is_err());
        assert!("5/4".parse::<CodeRate>().is_err());
        assert!("0.75".parse::<CodeRate>().is_err());
    }

    #[test]
    fn reference_capacity_pairs() {
        let pairs = select_pairs(2.289, 2.125, &standard_rates(), DEFAULT_M_MAX).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!((pairs[0].rate.to_string(), pairs[0].m), ("1/4".to_string(), 512));
        assert_eq!((pairs[1].rate.to_string(), pairs[1].m), ("3/4".to_string(), 8));
        assert!((pairs[0].interval_lo - 8.5).abs() < 5e-4);
        assert!((pairs[0].interval_hi - 9.156).abs() < 5e-4);
        assert!((pairs[1].interval_lo - 2.833).abs() < 5e-4);
        assert!((pairs[1].interval_hi - 3.052).abs() < 5e-4);
    }

    #[test]
    fn no_gap_is_distinct_error() {
        assert!(matches!(
            select_pairs(2.0, 2.0, &standard_rates(), 1024),
            Err(SteepError::NoCapacityGap { .. })
        ));
        // A gap with no fitting pair is an empty list, not an error.
        let r = select_pairs(2.2, 2.19, &[CodeRate::new(1, 2).unwrap()], 1024).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn gate_examples() {
        let pair = CodePair::new(CodeRate::new(1, 4).unwrap(), 512, 2.289, 2.125).unwrap();
        assert!(reliable_capacity_gate(&pair, 2.289));
        assert!(!reliable_capacity_gate(&pair, 2.125));
        assert!(!reliable_capacity_gate(&pair, 2.25));
    }

    #[test]
    fn non_power_of_two_rejected() {
        assert!(CodePair::new(CodeRate::new(1, 2).unwrap(), 12, 3.0, 1.0).is_err());
        assert!(CodePair::new(CodeRate::new(1, 2).unwrap(), 1, 3.0, 1.0).is_err());
    }
}
