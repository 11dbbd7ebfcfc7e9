//! Characteristic functions of inputs and channels and the
//! Braunstein–Kimble fidelity integral for coherent and squeezed inputs.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasespace::MixedPartConvention;
use crate::quadrature::{integrate_plane, QuadratureConfig};
use crate::specfun::{factorial, kummer_1f1, laguerre, laguerre_real, Sign, MAX_EXPONENT};
use crate::states::{cat_norm, superposition_norm, QuasiWernerParams};

/// Largest squeezing magnitude accepted.
pub const MAX_SQUEEZING: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InputState {
    Coherent { gamma: Complex64 },
    Squeezed { s: f64, phi: f64 },
}

impl InputState {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InputState::Coherent { gamma } if gamma.re.is_finite() && gamma.im.is_finite() => Ok(()),
            InputState::Coherent { .. } => Err(Error::InvalidParameter("gamma is not finite".into())),
            InputState::Squeezed { s, phi } => {
                if !(0.0..=MAX_SQUEEZING).contains(&s) {
                    return Err(Error::InvalidParameter(format!("squeezing s = {s} outside [0, {MAX_SQUEEZING}]")));
                }
                if !phi.is_finite() {
                    return Err(Error::InvalidParameter("squeezing phase is not finite".into()));
                }
                Ok(())
            }
        }
    }

    pub fn chi(&self, mu: Complex64) -> Complex64 {
        match *self {
            InputState::Coherent { gamma } => chi_coherent(gamma, mu),
            InputState::Squeezed { s, phi } => chi_squeezed(s, phi, mu),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InputState::Coherent { .. } => "coherent",
            InputState::Squeezed { .. } => "squeezed",
        }
    }

    fn squeezing(&self) -> f64 {
        match *self {
            InputState::Coherent { .. } => 0.0,
            InputState::Squeezed { s, .. } => s,
        }
    }
}

/// `e^{-|μ|²/2} e^{γ*μ - γμ*}`.
pub fn chi_coherent(gamma: Complex64, mu: Complex64) -> Complex64 {
    let phase = gamma.conj() * mu - gamma * mu.conj();
    Complex64::from_polar((-0.5 * mu.norm_sqr()).exp(), phase.im)
}

/// `e^{-|μ'|²/2}` with `μ' = μ cosh s + μ* e^{-iφ} sinh s`.
pub fn chi_squeezed(s: f64, phi: f64, mu: Complex64) -> Complex64 {
    let mp = mu * s.cosh() + mu.conj() * Complex64::from_polar(s.sinh(), -phi);
    Complex64::new((-0.5 * mp.norm_sqr()).exp(), 0.0)
}

/// Which pure-state channel characteristic function to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelModel {
    /// The simplified closed form built from `L_m±` with arguments
    /// `α* z ± |α|²`.
    #[default]
    ClosedForm,
    /// `tr[ρ D(z1) D(z2)]` assembled from exact displaced matrix elements.
    Exact,
}

impl std::str::FromStr for ChannelModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-form" => Ok(Self::ClosedForm),
            "exact" => Ok(Self::Exact),
            _ => Err(Error::InvalidParameter(format!("unknown channel model `{s}`"))),
        }
    }
}

fn check_exponent(e: Complex64, what: &str) -> Result<()> {
    if e.re > MAX_EXPONENT || !e.re.is_finite() {
        return Err(Error::Rescale(format!("{what}: exponent {:.3e} out of range", e.re)));
    }
    Ok(())
}

/// `⟨α| a^m D(z) a†^m |α⟩`
/// `= m! e^{-|z|²/2 + zα* - z*α} L_m(-(α* - z*)(α + z))`.
pub fn displaced_matrix_element(alpha: Complex64, m: u32, z: Complex64) -> Result<Complex64> {
    let e = -0.5 * z.norm_sqr() + z * alpha.conj() - z.conj() * alpha;
    check_exponent(e, "displaced matrix element")?;
    let x = (alpha.conj() - z.conj()) * (alpha + z);
    Ok(factorial(m) * e.exp() * laguerre(m, -x))
}

/// Same element through `m! e^{|z|²/2 - |α|²} 1F1(m+1; 1; (α* - z*)(α + z))`.
pub fn displaced_matrix_element_kummer(alpha: Complex64, m: u32, z: Complex64) -> Result<Complex64> {
    let x = (alpha.conj() - z.conj()) * (alpha + z);
    let e = 0.5 * z.norm_sqr() - alpha.norm_sqr();
    check_exponent(Complex64::new(e, 0.0) + x, "Kummer matrix element")?;
    Ok(factorial(m) * e.exp() * kummer_1f1(m as i64 + 1, 1, x)?)
}

/// `⟨b,m| D(z) |a,m⟩` between normalized photon-added coherent states with
/// `|a| = |b|`.
fn pacs_kernel(b: Complex64, a: Complex64, m: u32, z: Complex64) -> Result<Complex64> {
    let e = -0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + b.conj() * a - 0.5 * z.norm_sqr() + z * b.conj()
        - z.conj() * a;
    check_exponent(e, "photon-added kernel")?;
    let x = (b.conj() - z.conj()) * (a + z);
    Ok(e.exp() * laguerre(m, -x) / laguerre_real(m, -a.norm_sqr()))
}

/// `e^{x+y-shift} L_m(-x) L_m(-y) ± e^{-x-y-shift} L_m(x) L_m(y)`.
fn lm_pm_shifted(sign: Sign, m: u32, x: Complex64, y: Complex64, shift: f64) -> Result<Complex64> {
    let up = x + y - shift;
    let down = -x - y - shift;
    check_exponent(up, "shifted L_m±")?;
    check_exponent(down, "shifted L_m±")?;
    Ok(up.exp() * laguerre(m, -x) * laguerre(m, -y) + sign.factor() * down.exp() * laguerre(m, x) * laguerre(m, y))
}

/// Simplified closed form of the pure-channel characteristic function,
/// evaluated with the common `e^{|α|²+|β|²}` scale divided out.
pub fn chi_channel_pure_closed_form(p: &QuasiWernerParams, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    p.validate()?;
    let (al, be, m, sign) = (p.alpha, p.beta, p.m, p.sign);
    let (xa, xb) = (al.norm_sqr(), be.norm_sqr());
    let shift = xa + xb;
    let norm = lm_pm_shifted(sign, m, Complex64::new(xa, 0.0), Complex64::new(xb, 0.0), shift)?;
    if norm.norm() < 1e-300 {
        return Err(Error::DegenerateState("superposition vanishes".into()));
    }
    let (u, v) = (al.conj() * z1, be.conj() * z2);
    let t1 = (-(al * z1.conj()) - be * z2.conj()).exp() * lm_pm_shifted(sign, m, u + xa, v + xb, shift)?;
    let t2 = (al * z1.conj() + be * z2.conj()).exp() * lm_pm_shifted(sign, m, u - xa, v - xb, shift)?;
    let pre = (-0.5 * z1.norm_sqr() - 0.5 * z2.norm_sqr()).exp() / (norm * 2.0);
    Ok(pre * (t1 + sign.factor() * t2))
}

/// `⟨ψ±| D(z1) ⊗ D(z2) |ψ±⟩` from the exact kernels.
pub fn chi_channel_pure_exact(p: &QuasiWernerParams, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    p.validate()?;
    let (al, be, m) = (p.alpha, p.beta, p.m);
    let n2 = superposition_norm(p.sign, al, be, m)?.powi(2);
    let s = p.sign.factor();
    let k = |b, a, z| pacs_kernel(b, a, m, z);
    let direct = k(al, al, z1)? * k(be, be, z2)? + k(-al, -al, z1)? * k(-be, -be, z2)?;
    let cross = k(al, -al, z1)? * k(be, -be, z2)? + k(-al, al, z1)? * k(-be, be, z2)?;
    Ok((direct + cross * s) * n2)
}

pub fn chi_channel_pure(p: &QuasiWernerParams, z1: Complex64, z2: Complex64, model: ChannelModel) -> Result<Complex64> {
    match model {
        ChannelModel::ClosedForm => chi_channel_pure_closed_form(p, z1, z2),
        ChannelModel::Exact => chi_channel_pure_exact(p, z1, z2),
    }
}

/// Characteristic function of `(|+_ξ⟩⟨+_ξ| + |-_ξ⟩⟨-_ξ|)/2`.
pub fn chi_half_identity(xi: Complex64, m: u32, z: Complex64) -> Result<Complex64> {
    let np = cat_norm(Sign::Plus, xi, m)?.powi(2);
    let nm = cat_norm(Sign::Minus, xi, m)?.powi(2);
    let direct = pacs_kernel(xi, xi, m, z)? + pacs_kernel(-xi, -xi, m, z)?;
    let cross = pacs_kernel(xi, -xi, m, z)? + pacs_kernel(-xi, xi, m, z)?;
    Ok(direct * (0.5 * (np + nm)) + cross * (0.5 * (np - nm)))
}

/// Characteristic function of the mixed part alone.
pub fn chi_channel_mixed(p: &QuasiWernerParams, z1: Complex64, z2: Complex64, convention: MixedPartConvention) -> Result<Complex64> {
    match convention {
        MixedPartConvention::SubspaceIdentity => Ok(chi_half_identity(p.alpha, p.m, z1)? * chi_half_identity(p.beta, p.m, z2)?),
        MixedPartConvention::PaperFlat => Err(Error::UnsupportedConvention(
            "the flat mixed part has a delta-function characteristic function".into(),
        )),
    }
}

/// `(1-a) χ_mix + a χ_pure`.
pub fn chi_channel(
    p: &QuasiWernerParams,
    z1: Complex64,
    z2: Complex64,
    convention: MixedPartConvention,
    model: ChannelModel,
) -> Result<Complex64> {
    let pure = chi_channel_pure(p, z1, z2, model)?;
    if p.a >= 1.0 {
        return Ok(pure);
    }
    Ok(pure * p.a + chi_channel_mixed(p, z1, z2, convention)? * (1.0 - p.a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    pub value: f64,
    pub quadrature_error_estimate: f64,
    pub evals: u64,
    pub imaginary_residue: f64,
}

impl FidelityResult {
    pub fn beats_classical_bound(&self) -> bool {
        self.value > 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FidelityOptions {
    pub convention: MixedPartConvention,
    pub model: ChannelModel,
    pub quadrature: QuadratureConfig,
}

/// Default half-width of the `μ` square.
pub fn fidelity_half_width(p: &QuasiWernerParams, input: &InputState) -> f64 {
    let s = input.squeezing();
    6.0 + 2.0 * p.alpha.norm().max(p.beta.norm()) + s * s.exp()
}

fn fidelity_integral<F: FnMut(Complex64) -> Result<Complex64>>(
    input: &InputState,
    mut chan: F,
    half_width: f64,
    cfg: &QuadratureConfig,
) -> Result<FidelityResult> {
    input.validate()?;
    let mut failure = None;
    let r = integrate_plane(
        |x, y| {
            let mu = Complex64::new(x, y);
            match chan(mu) {
                Ok(c) => input.chi(mu) * input.chi(-mu) * c,
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        cfg,
        half_width,
        "fidelity",
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(FidelityResult {
        value: r.value.re / PI,
        quadrature_error_estimate: r.error_estimate / PI,
        evals: r.evals,
        imaginary_residue: r.value.im / PI,
    })
}

/// Fidelity of the pure channel and of the mixed part separately; the
/// channel fidelity at mixing `a` is `(1-a) F_mix + a F_pure`.
pub fn fidelity_components(
    input: &InputState,
    p: &QuasiWernerParams,
    opts: &FidelityOptions,
) -> Result<(FidelityResult, FidelityResult)> {
    let hw = fidelity_half_width(p, input);
    let pure = fidelity_integral(input, |mu| chi_channel_pure(p, -mu.conj(), -mu, opts.model), hw, &opts.quadrature)?;
    let mix = fidelity_integral(
        input,
        |mu| chi_channel_mixed(p, -mu.conj(), -mu, opts.convention),
        hw,
        &opts.quadrature,
    )?;
    Ok((pure, mix))
}

fn combine(a: f64, pure: &FidelityResult, mix: &FidelityResult) -> FidelityResult {
    FidelityResult {
        value: a * pure.value + (1.0 - a) * mix.value,
        quadrature_error_estimate: a * pure.quadrature_error_estimate + (1.0 - a) * mix.quadrature_error_estimate,
        evals: pure.evals + mix.evals,
        imaginary_residue: a * pure.imaginary_residue + (1.0 - a) * mix.imaginary_residue,
    }
}

/// `F = (1/π) ∫ χ_in(μ) χ_in(-μ) χ_ch(-μ*, -μ) d²μ`.
pub fn fidelity(input: &InputState, p: &QuasiWernerParams, opts: &FidelityOptions) -> Result<FidelityResult> {
    p.validate()?;
    if p.a < 1.0 && opts.convention == MixedPartConvention::PaperFlat {
        return Err(Error::UnsupportedConvention("fidelity needs the subspace mixed part".into()));
    }
    let hw = fidelity_half_width(p, input);
    let pure = fidelity_integral(input, |mu| chi_channel_pure(p, -mu.conj(), -mu, opts.model), hw, &opts.quadrature)?;
    if p.a >= 1.0 {
        return Ok(pure);
    }
    let mix = fidelity_integral(
        input,
        |mu| chi_channel_mixed(p, -mu.conj(), -mu, opts.convention),
        hw,
        &opts.quadrature,
    )?;
    let out = combine(p.a, &pure, &mix);
    check_range(&out)?;
    Ok(out)
}

fn check_range(r: &FidelityResult) -> Result<()> {
    if !(r.value >= -1e-8 && r.value <= 1.0 + 1e-8) {
        return Err(Error::Convergence {
            context: format!("fidelity {} outside [0, 1]", r.value),
            levels: 0,
            last_change: f64::NAN,
            error_estimate: r.quadrature_error_estimate,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub a: f64,
    pub fidelity: FidelityResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub params: QuasiWernerParams,
    pub points: Vec<SweepPoint>,
    pub max_fidelity: f64,
    pub argmax_a: f64,
}

/// Fidelity along a list of mixing parameters for fixed `(α, β, m, ±)`.
pub fn fidelity_sweep(
    input: &InputState,
    p: &QuasiWernerParams,
    a_values: &[f64],
    opts: &FidelityOptions,
) -> Result<FidelityCurve> {
    if a_values.is_empty() {
        return Err(Error::InvalidParameter("empty mixing-parameter sweep".into()));
    }
    let needs_mix = a_values.iter().any(|&a| a < 1.0);
    if needs_mix && opts.convention == MixedPartConvention::PaperFlat {
        return Err(Error::UnsupportedConvention("fidelity needs the subspace mixed part".into()));
    }
    let base = p.with_a(1.0)?;
    let (pure, mix) = if needs_mix {
        fidelity_components(input, &base, opts)?
    } else {
        let hw = fidelity_half_width(&base, input);
        let pure = fidelity_integral(input, |mu| chi_channel_pure(&base, -mu.conj(), -mu, opts.model), hw, &opts.quadrature)?;
        (pure, FidelityResult { value: 0.0, quadrature_error_estimate: 0.0, evals: 0, imaginary_residue: 0.0 })
    };
    let mut points = Vec::with_capacity(a_values.len());
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for &a in a_values {
        p.with_a(a)?;
        let f = if a >= 1.0 { pure } else { combine(a, &pure, &mix) };
        check_range(&f)?;
        if f.value > best.0 {
            best = (f.value, a);
        }
        points.push(SweepPoint { a, fidelity: f });
    }
    Ok(FidelityCurve { params: base, points, max_fidelity: best.0, argmax_a: best.1 })
}

/// Uniform average over the squeezing phase on a periodic grid.
pub fn average_fidelity_squeezed(
    p: &QuasiWernerParams,
    s: f64,
    resolution: usize,
    opts: &FidelityOptions,
) -> Result<f64> {
    if resolution < 8 {
        return Err(Error::InvalidParameter(format!("phase average needs at least 8 samples, got {resolution}")));
    }
    let mut sum = 0.0;
    for k in 0..resolution {
        let phi = 2.0 * PI * k as f64 / resolution as f64;
        sum += fidelity(&InputState::Squeezed { s, phi }, p, opts)?.value;
    }
    Ok(sum / resolution as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn input_characteristic_functions() {
        assert_eq!(chi_coherent(c(0.3, 1.0), c(0.0, 0.0)), c(1.0, 0.0));
        let mu = c(0.4, -0.9);
        assert!((chi_coherent(c(0.0, 0.0), mu) - c((-0.5 * mu.norm_sqr()).exp(), 0.0)).norm() < 1e-16);
        assert!((chi_squeezed(0.0, 1.0, mu) - c((-0.5 * mu.norm_sqr()).exp(), 0.0)).norm() < 1e-16);
        let s = 0.3f64;
        let x = 0.7;
        assert!((chi_squeezed(s, 0.0, c(x, 0.0)).re - (-0.5 * x * x * (2.0 * s).exp()).exp()).abs() < 1e-15);
        assert!((chi_squeezed(0.2, 1.0, c(0.3, 0.4)).re - 0.917_695_042_026_296_1).abs() < 1e-15);
    }

    #[test]
    fn displaced_element_limits() {
        let z = c(0.6, -0.2);
        let al = c(0.5, 0.3);
        let v = displaced_matrix_element(al, 0, z).unwrap();
        let want = (-0.5 * z.norm_sqr() + al.conj() * z - al * z.conj()).exp();
        assert!((v - want).norm() < 1e-15);
        for m in 0..5 {
            let v = displaced_matrix_element(c(0.0, 0.0), m, z).unwrap();
            let want = factorial(m) * (-0.5 * z.norm_sqr()).exp() * laguerre_real(m, z.norm_sqr());
            assert!((v - c(want, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn displaced_element_kummer_form() {
        for m in 0..4 {
            for &(al, z) in &[(c(0.7, 0.0), c(0.5, -0.3)), (c(1.2, -0.4), c(-2.0, 1.5)), (c(0.1, 0.9), c(3.0, 0.2))] {
                let a = displaced_matrix_element(al, m, z).unwrap();
                let b = displaced_matrix_element_kummer(al, m, z).unwrap();
                assert!((a - b).norm() < 1e-10 * a.norm().max(1e-12), "m={m} al={al} z={z}");
            }
        }
    }

    #[test]
    fn pure_channel_normalization() {
        for model in [ChannelModel::ClosedForm, ChannelModel::Exact] {
            for sign in [Sign::Plus, Sign::Minus] {
                let p = QuasiWernerParams::real(0.67, 0.67, 2, 1.0, sign).unwrap();
                let v = chi_channel_pure(&p, c(0.0, 0.0), c(0.0, 0.0), model).unwrap();
                assert!((v - c(1.0, 0.0)).norm() < 1e-12, "{model:?} {sign}");
            }
        }
    }

    #[test]
    fn closed_form_and_exact_agree_without_photon_addition() {
        let (z1, z2) = (c(0.4, -0.3), c(-0.2, 0.9));
        for sign in [Sign::Plus, Sign::Minus] {
            let p = QuasiWernerParams::new(c(0.67, 0.2), c(0.5, -0.4), 0, 1.0, sign).unwrap();
            let a = chi_channel_pure_closed_form(&p, z1, z2).unwrap();
            let b = chi_channel_pure_exact(&p, z1, z2).unwrap();
            assert!((a - b).norm() < 1e-13, "{sign}: {a} vs {b}");
        }
    }

    #[test]
    fn two_mode_vacuum_channel() {
        let p = QuasiWernerParams::real(0.0, 0.0, 0, 1.0, Sign::Plus).unwrap();
        let (z1, z2) = (c(0.3, 0.3), c(-1.0, 0.2));
        let want = (-0.5 * z1.norm_sqr() - 0.5 * z2.norm_sqr()).exp();
        for model in [ChannelModel::ClosedForm, ChannelModel::Exact] {
            assert!((chi_channel_pure(&p, z1, z2, model).unwrap() - c(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn mixed_channel_rules() {
        let p = QuasiWernerParams::real(0.67, 0.67, 1, 0.4, Sign::Minus).unwrap();
        let v = chi_channel(&p, c(0.0, 0.0), c(0.0, 0.0), MixedPartConvention::SubspaceIdentity, ChannelModel::Exact).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        assert!(matches!(
            chi_channel(&p, c(0.1, 0.0), c(0.0, 0.0), MixedPartConvention::PaperFlat, ChannelModel::Exact),
            Err(Error::UnsupportedConvention(_))
        ));
        let q = p.with_a(1.0).unwrap();
        let z = (c(0.3, 0.1), c(0.2, -0.5));
        assert_eq!(
            chi_channel(&q, z.0, z.1, MixedPartConvention::PaperFlat, ChannelModel::ClosedForm).unwrap(),
            chi_channel_pure(&q, z.0, z.1, ChannelModel::ClosedForm).unwrap()
        );
    }

    #[test]
    fn fidelity_rejects_flat_mixture() {
        let p = QuasiWernerParams::real(0.67, 0.67, 0, 0.5, Sign::Plus).unwrap();
        let opts = FidelityOptions { convention: MixedPartConvention::PaperFlat, ..Default::default() };
        assert!(matches!(
            fidelity(&InputState::Coherent { gamma: c(0.0, 0.0) }, &p, &opts),
            Err(Error::UnsupportedConvention(_))
        ));
    }

    #[test]
    fn vacuum_channel_fidelity() {
        // F = (1/π) ∫ e^{-|μ|²} e^{-|μ|²} d²μ = 1/2
        let p = QuasiWernerParams::real(0.0, 0.0, 0, 1.0, Sign::Plus).unwrap();
        let f = fidelity(&InputState::Coherent { gamma: c(1.0, 0.5) }, &p, &FidelityOptions::default()).unwrap();
        assert!((f.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn sweep_single_point_matches_fidelity() {
        let p = QuasiWernerParams::real(0.67, 0.67, 0, 0.7, Sign::Plus).unwrap();
        let input = InputState::Coherent { gamma: c(0.0, 0.0) };
        let opts = FidelityOptions::default();
        let f = fidelity(&input, &p, &opts).unwrap();
        let s = fidelity_sweep(&input, &p, &[0.7], &opts).unwrap();
        assert_eq!(s.points.len(), 1);
        assert!((s.points[0].fidelity.value - f.value).abs() < 1e-14);
        assert!(fidelity_sweep(&input, &p, &[], &opts).is_err());
    }

    #[test]
    fn squeezed_average_rules() {
        let p = QuasiWernerParams::real(0.4, 0.4, 1, 1.0, Sign::Plus).unwrap();
        let opts = FidelityOptions::default();
        assert!(average_fidelity_squeezed(&p, 0.2, 4, &opts).is_err());
        let avg0 = average_fidelity_squeezed(&p, 0.0, 8, &opts).unwrap();
        let vac = fidelity(&InputState::Coherent { gamma: c(0.0, 0.0) }, &p, &opts).unwrap();
        assert!((avg0 - vac.value).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn coherent_modulus(gr in -3.0f64..3.0, gi in -3.0f64..3.0, mr in -3.0f64..3.0, mi in -3.0f64..3.0) {
            let mu = c(mr, mi);
            let v = chi_coherent(c(gr, gi), mu);
            prop_assert!((v.norm() - (-0.5 * mu.norm_sqr()).exp()).abs() < 1e-15);
        }

        #[test]
        fn exact_channel_is_hermitian(al in 0.0f64..1.5, be in 0.1f64..1.5, m in 0u32..=3, plus in any::<bool>(),
                                      x1 in -2.0f64..2.0, y1 in -2.0f64..2.0, x2 in -2.0f64..2.0, y2 in -2.0f64..2.0) {
            let sign = if plus { Sign::Plus } else { Sign::Minus };
            let p = QuasiWernerParams::real(al, be, m, 1.0, sign).unwrap();
            let (z1, z2) = (c(x1, y1), c(x2, y2));
            let a = chi_channel_pure_exact(&p, z1, z2).unwrap();
            let b = chi_channel_pure_exact(&p, -z1, -z2).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-12);
        }
    }
}
