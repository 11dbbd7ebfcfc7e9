//! Photon-added coherent states, their two-mode superpositions and the
//! even/odd basis built from them.
//!
//! Everything is expressed through the overlap ratio
//! `r(X) = e^{-2X} L_m(X) / L_m(-X)` with `X = |ξ|²`, which is the inner
//! product `⟨-ξ,m|ξ,m⟩`. Working with `r` keeps the normalizations finite for
//! large amplitudes, where the raw `e^{|ξ|²}` factors would overflow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{laguerre_real, Sign};

/// Amplitudes beyond this modulus are rejected.
pub const MAX_AMPLITUDE: f64 = 50.0;

/// Denominators below this are treated as a vanishing state.
pub const DEGENERACY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiWernerParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub m: u32,
    pub a: f64,
    pub sign: Sign,
}

impl QuasiWernerParams {
    pub fn new(alpha: Complex64, beta: Complex64, m: u32, a: f64, sign: Sign) -> Result<Self> {
        let p = QuasiWernerParams { alpha, beta, m, a, sign };
        p.validate()?;
        Ok(p)
    }

    /// Real-amplitude shorthand.
    pub fn real(alpha: f64, beta: f64, m: u32, a: f64, sign: Sign) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0), m, a, sign)
    }

    pub fn validate(&self) -> Result<()> {
        check_amplitude("alpha", self.alpha)?;
        check_amplitude("beta", self.beta)?;
        if !(0.0..=1.0).contains(&self.a) {
            return Err(Error::InvalidParameter(format!(
                "mixing parameter a = {} outside [0, 1]",
                self.a
            )));
        }
        if self.sign == Sign::Minus && self.alpha.norm() == 0.0 && self.beta.norm() == 0.0 {
            return Err(Error::DegenerateState(
                "odd superposition vanishes at alpha = beta = 0".into(),
            ));
        }
        Ok(())
    }

    pub fn with_a(mut self, a: f64) -> Result<Self> {
        self.a = a;
        self.validate()?;
        Ok(self)
    }

    pub fn with_m(self, m: u32) -> Self {
        QuasiWernerParams { m, ..self }
    }

    pub fn with_sign(self, sign: Sign) -> Result<Self> {
        let p = QuasiWernerParams { sign, ..self };
        p.validate()?;
        Ok(p)
    }
}

fn check_amplitude(name: &str, v: Complex64) -> Result<()> {
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} is not finite")));
    }
    if v.norm() > MAX_AMPLITUDE {
        return Err(Error::InvalidParameter(format!(
            "|{name}| = {} exceeds {MAX_AMPLITUDE}",
            v.norm()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchmidtAmplitudes {
    pub chi0: f64,
    pub chi1: f64,
}

/// `⟨-ξ,m|ξ,m⟩ = e^{-2|ξ|²} L_m(|ξ|²) / L_m(-|ξ|²)`.
pub fn photon_added_overlap(xi: Complex64, m: u32) -> f64 {
    overlap_ratio(xi.norm_sqr(), m)
}

pub(crate) fn overlap_ratio(x: f64, m: u32) -> f64 {
    (-2.0 * x).exp() * laguerre_real(m, x) / laguerre_real(m, -x)
}

/// `1 - r(X)` without cancellation for small `X`.
///
/// Uses `L_m(-X) - L_m(X) = 2 Σ_{k odd} C(m,k) X^k / k!`.
pub(crate) fn one_minus_overlap(x: f64, m: u32) -> f64 {
    let mut odd = 0.0;
    let mut term = 1.0; // C(m,k) X^k / k!
    for k in 1..=m {
        let kf = k as f64;
        term *= (m as f64 - kf + 1.0) / kf * x / kf;
        if k % 2 == 1 {
            odd += term;
        }
    }
    let lpos = laguerre_real(m, x);
    let lneg = laguerre_real(m, -x);
    (2.0 * odd + (-(-2.0 * x).exp_m1()) * lpos) / lneg
}

/// `1 + s·r(X)` for either sign.
pub(crate) fn one_plus_signed_overlap(sign: Sign, x: f64, m: u32) -> f64 {
    match sign {
        Sign::Plus => 1.0 + overlap_ratio(x, m),
        Sign::Minus => one_minus_overlap(x, m),
    }
}

/// `1 + s·r(A)r(B)`, accurate when the product approaches one.
fn one_plus_signed_product(sign: Sign, xa: f64, xb: f64, m: u32) -> f64 {
    let (ra, rb) = (overlap_ratio(xa, m), overlap_ratio(xb, m));
    match sign {
        Sign::Plus => 1.0 + ra * rb,
        Sign::Minus => one_minus_overlap(xa, m) + ra * one_minus_overlap(xb, m),
    }
}

/// Normalization `N±` of `|α,β,m⟩ ± |-α,-β,m⟩`.
pub fn superposition_norm(sign: Sign, alpha: Complex64, beta: Complex64, m: u32) -> Result<f64> {
    let d = one_plus_signed_product(sign, alpha.norm_sqr(), beta.norm_sqr(), m);
    if d <= DEGENERACY_FLOOR {
        return Err(Error::DegenerateState(format!(
            "superposition norm denominator {d:.3e} vanishes"
        )));
    }
    Ok((1.0 / (2.0 * d)).sqrt())
}

/// Normalization `n±` of `|ξ,m⟩ ± |-ξ,m⟩`.
pub fn cat_norm(sign: Sign, xi: Complex64, m: u32) -> Result<f64> {
    let d = one_plus_signed_overlap(sign, xi.norm_sqr(), m);
    if d <= DEGENERACY_FLOOR {
        return Err(Error::DegenerateState(format!(
            "{sign} cat state with |xi| = {} vanishes",
            xi.norm()
        )));
    }
    Ok((1.0 / (2.0 * d)).sqrt())
}

/// Amplitudes of the pure state on the even/odd product basis, scaled so
/// that the expansion coefficients are `chi0/2` and `chi1/2`.
///
/// For `+` the state is `(chi0 |+,+⟩ + chi1 |-,-⟩)/2`, for `-` it is
/// `(chi0 |+,-⟩ + chi1 |-,+⟩)/2`.
pub fn schmidt_amplitudes(p: &QuasiWernerParams) -> Result<SchmidtAmplitudes> {
    p.validate()?;
    let (xa, xb, m) = (p.alpha.norm_sqr(), p.beta.norm_sqr(), p.m);
    let denom = one_plus_signed_product(p.sign, xa, xb, m);
    if denom <= DEGENERACY_FLOOR {
        return Err(Error::DegenerateState("superposition vanishes".into()));
    }
    let (pa, ma) = (1.0 + overlap_ratio(xa, m), one_minus_overlap(xa, m));
    let (pb, mb) = (1.0 + overlap_ratio(xb, m), one_minus_overlap(xb, m));
    let (c0, c1) = match p.sign {
        Sign::Plus => (pa * pb, ma * mb),
        Sign::Minus => (pa * mb, ma * pb),
    };
    Ok(SchmidtAmplitudes {
        chi0: (2.0 * c0 / denom).sqrt(),
        chi1: (2.0 * c1 / denom).sqrt(),
    })
}

/// Weights of the even and odd basis states in the reduced state of one mode.
///
/// Returns `(w_even, w_odd)`; they sum to one.
pub fn reduced_weights(p: &QuasiWernerParams, mode: usize) -> Result<(f64, f64)> {
    let s = schmidt_amplitudes(p)?;
    let mix = (1.0 - p.a) / 2.0;
    let w0 = mix + p.a * s.chi0 * s.chi0 / 4.0;
    let w1 = mix + p.a * s.chi1 * s.chi1 / 4.0;
    match (mode, p.sign) {
        (1, _) | (2, Sign::Plus) => Ok((w0, w1)),
        (2, Sign::Minus) => Ok((w1, w0)),
        _ => Err(Error::InvalidParameter(format!("mode index {mode} is not 1 or 2"))),
    }
}
