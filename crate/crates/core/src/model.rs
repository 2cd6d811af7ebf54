//! Closed-form model of one echoed-probe round trip.
//!
//! Phase 1: Alice sends a unit-variance probe `x1`, Bob receives `y1 = x1 + w1`.
//! Phase 2: Bob sends `x2 = c1*y1 + c2*s2` with unit power, Alice receives
//! `y2 = x2 + w2`. Eve hears `z1 = x1 + v1` and `z2 = x2 + v2`.
//!
//! Every SNR in this module is linear. Convert with [`db_to_linear`] at the
//! boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SteepError};

/// Relative tolerance applied to the eavesdropper MSE denominator.
pub const EVE_DENOMINATOR_RTOL: f64 = 1e-12;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Upper end of the admissible open interval for `c1^2`, i.e. `1 / (1 + 1/p1)`.
pub fn c1_sq_upper_bound(p1: f64) -> f64 {
    1.0 / (1.0 + 1.0 / p1)
}

/// Secret-symbol power `c2^2 = 1 - c1^2 (1 + 1/p1)` left by the unit-power constraint.
///
/// Accepts `c1_sq = 0` (no echo, all power on the secret symbol); rejects
/// negative weights and weights at or above the upper bound.
pub fn c2_sq(p1: f64, c1_sq: f64) -> Result<f64> {
    check_positive("p1", p1)?;
    let upper = c1_sq_upper_bound(p1);
    if !(c1_sq >= 0.0 && c1_sq < upper) {
        return Err(SteepError::InfeasibleWeight { c1_sq, upper });
    }
    Ok(1.0 - c1_sq * (1.0 + 1.0 / p1))
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    // +inf is allowed: it models a noiseless link.
    if value.is_nan() || value <= 0.0 {
        return Err(SteepError::InvalidParameter {
            name,
            value,
            reason: "must be positive",
        });
    }
    Ok(())
}

/// The five scalars that determine the secrecy rate.
///
/// SNRs and advantages may be `+inf` to model a noiseless receiver; `NaN`
/// and non-positive values are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystemParams")]
pub struct SystemParams {
    p1: f64,
    p2: f64,
    alpha1: f64,
    alpha2: f64,
    c1_sq: f64,
}

#[derive(Deserialize)]
struct RawSystemParams {
    p1: f64,
    p2: f64,
    alpha1: f64,
    alpha2: f64,
    c1_sq: f64,
}

impl TryFrom<RawSystemParams> for SystemParams {
    type Error = SteepError;

    fn try_from(r: RawSystemParams) -> Result<Self> {
        SystemParams::new(r.p1, r.p2, r.alpha1, r.alpha2, r.c1_sq)
    }
}

impl SystemParams {
    pub fn new(p1: f64, p2: f64, alpha1: f64, alpha2: f64, c1_sq: f64) -> Result<Self> {
        check_positive("p1", p1)?;
        check_positive("p2", p2)?;
        check_positive("alpha1", alpha1)?;
        check_positive("alpha2", alpha2)?;
        let upper = c1_sq_upper_bound(p1);
        if !(c1_sq > 0.0 && c1_sq < upper) {
            return Err(SteepError::InfeasibleWeight { c1_sq, upper });
        }
        Ok(Self {
            p1,
            p2,
            alpha1,
            alpha2,
            c1_sq,
        })
    }

    /// Builds parameters from dB SNRs and an eavesdropper geometry.
    pub fn from_db_geometry(p1_db: f64, p2_db: f64, geom: &GeometryParams, c1_sq: f64) -> Result<Self> {
        let (a1, a2) = geom.eve_advantages();
        Self::new(db_to_linear(p1_db), db_to_linear(p2_db), a1, a2, c1_sq)
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }
    pub fn p2(&self) -> f64 {
        self.p2
    }
    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }
    pub fn c1_sq(&self) -> f64 {
        self.c1_sq
    }

    /// User phase-1 noise variance σ₁².
    pub fn sigma1_sq(&self) -> f64 {
        1.0 / self.p1
    }
    /// User phase-2 noise variance σ₂².
    pub fn sigma2_sq(&self) -> f64 {
        1.0 / self.p2
    }
    /// Eve phase-1 noise variance ε₁².
    pub fn eps1_sq(&self) -> f64 {
        1.0 / (self.alpha1 * self.p1)
    }
    /// Eve phase-2 noise variance ε₂².
    pub fn eps2_sq(&self) -> f64 {
        1.0 / (self.alpha2 * self.p2)
    }

    pub fn c1_sq_upper_bound(&self) -> f64 {
        c1_sq_upper_bound(self.p1)
    }

    pub fn c2_sq(&self) -> f64 {
        1.0 - self.c1_sq * (1.0 + self.sigma1_sq())
    }

    /// Same parameters with another combining weight.
    pub fn with_c1_sq(&self, c1_sq: f64) -> Result<Self> {
        Self::new(self.p1, self.p2, self.alpha1, self.alpha2, c1_sq)
    }

    pub fn with_p2(&self, p2: f64) -> Result<Self> {
        Self::new(self.p1, p2, self.alpha1, self.alpha2, self.c1_sq)
    }

    pub fn with_alphas(&self, alpha1: f64, alpha2: f64) -> Result<Self> {
        Self::new(self.p1, self.p2, alpha1, alpha2, self.c1_sq)
    }

    /// Left side of the unit-power identity, `c1^2 (1 + σ₁²) + c2^2`.
    pub fn transmit_power(&self) -> f64 {
        self.c1_sq * (1.0 + self.sigma1_sq()) + self.c2_sq()
    }
}

/// Eavesdropper placement between Alice (d = 0) and Bob (d = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    d: f64,
    path_loss_exponent: f64,
    eta: f64,
}

impl GeometryParams {
    pub fn new(d: f64, path_loss_exponent: f64, eta: f64) -> Result<Self> {
        if !(d > 0.0 && d < 1.0) {
            return Err(SteepError::InvalidParameter {
                name: "d",
                value: d,
                reason: "must lie in (0, 1)",
            });
        }
        if !(1.0..=2.0).contains(&path_loss_exponent) {
            return Err(SteepError::InvalidParameter {
                name: "path_loss_exponent",
                value: path_loss_exponent,
                reason: "must lie in [1, 2]",
            });
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(SteepError::InvalidParameter {
                name: "eta",
                value: eta,
                reason: "must lie in (0, 1]",
            });
        }
        Ok(Self {
            d,
            path_loss_exponent,
            eta,
        })
    }

    /// Line-of-sight worst case: exponent 2, fully efficient eavesdropper.
    pub fn worst_case(d: f64) -> Result<Self> {
        Self::new(d, 2.0, 1.0)
    }

    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn path_loss_exponent(&self) -> f64 {
        self.path_loss_exponent
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Eve at the mirrored position, as seen from the other phase-1 transmitter.
    pub fn mirrored(&self) -> Self {
        Self {
            d: 1.0 - self.d,
            ..*self
        }
    }

    /// `(alpha1, alpha2) = (eta * d^-a, eta * (1-d)^-a)`.
    pub fn eve_advantages(&self) -> (f64, f64) {
        eve_advantages(self)
    }
}

pub fn eve_advantages(geom: &GeometryParams) -> (f64, f64) {
    let a = geom.path_loss_exponent;
    (
        geom.eta * geom.d.powf(-a),
        geom.eta * (1.0 - geom.d).powf(-a),
    )
}

/// MMSE and capacity summary for one parameter point. Rates are in bits per
/// round-trip sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecrecyReport {
    pub mse_user: f64,
    pub mse_eve: f64,
    pub cap_user: f64,
    pub cap_eve: f64,
    pub rs: f64,
    pub rs_plus: f64,
}

impl SecrecyReport {
    pub fn from_mses(mse_user: f64, mse_eve: f64) -> Self {
        let cap_user = -mse_user.log2();
        let cap_eve = -mse_eve.log2();
        let rs = cap_user - cap_eve;
        Self {
            mse_user,
            mse_eve,
            cap_user,
            cap_eve,
            rs,
            rs_plus: rs.max(0.0),
        }
    }
}

/// MSE of Alice's estimate of `s2` from `y2 - c1*x1`.
pub fn mse_user(params: &SystemParams) -> f64 {
    let c2_sq = params.c2_sq();
    let noise = params.c1_sq * params.sigma1_sq() + params.sigma2_sq();
    1.0 / (1.0 + c2_sq / noise)
}

/// MSE of Eve's joint LMMSE estimate of `s2` from `(z1, z2)`.
pub fn mse_eve(params: &SystemParams) -> Result<f64> {
    let c2_sq = params.c2_sq();
    let e1 = params.eps1_sq();
    let e2 = params.eps2_sq();
    let lead = (1.0 + e1) * (1.0 + e2 - c2_sq);
    let den = lead - params.c1_sq;
    if !(den > EVE_DENOMINATOR_RTOL * lead.abs().max(params.c1_sq)) {
        return Err(SteepError::Domain(format!(
            "eavesdropper MSE denominator {den:e} is not positive"
        )));
    }
    Ok(1.0 / (1.0 + c2_sq * (1.0 + e1) / den))
}

pub fn secrecy_report(params: &SystemParams) -> Result<SecrecyReport> {
    Ok(SecrecyReport::from_mses(mse_user(params), mse_eve(params)?))
}

/// Secrecy rate `R_s` (unclamped).
pub fn secrecy_rate(params: &SystemParams) -> Result<f64> {
    secrecy_report(params).map(|r| r.rs)
}

/// Iterated high-SNR limit `log2(1 + 1/alpha1)` (p2 → ∞, then p1 → ∞).
pub fn limit_rate(alpha1: f64) -> f64 {
    (1.0 + 1.0 / alpha1).log2()
}

/// Limit of the secrecy rate as `p2 → ∞` at fixed `p1`, `alpha1`, `c1^2`.
pub fn limit_rate_large_p2(p1: f64, alpha1: f64, c1_sq: f64) -> f64 {
    let e1 = 1.0 / (alpha1 * p1);
    ((1.0 - c1_sq) / (1.0 + e1 - c1_sq) * (1.0 + 1.0 / alpha1 + e1)).log2()
}
