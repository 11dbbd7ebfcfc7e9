//! Wigner functions of photon-added cat states and of the two-mode
//! quasi-Werner family, Wigner logarithmic negativity and the interference
//! minima locus.
//!
//! Phase-space points use `z = q + i p`.
//!
//! Every single-mode Wigner function used here is a combination of four
//! real basis functions of one mode: the two direct terms and the real and
//! imaginary parts of the interference term. The two-mode Wigner function is
//! then `Σ_kl M_kl u_k(z1) v_l(z2)` for a 4×4 coefficient matrix, which is
//! what makes the four-dimensional integrals tractable.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{composite_gl, integrate_plane_abs, integrate_plane_real, QuadratureConfig};
use crate::specfun::{laguerre, laguerre_real, Sign};
use crate::states::{cat_norm, reduced_weights, superposition_norm, QuasiWernerParams};

const TWO_OVER_PI: f64 = 2.0 / PI;

/// Two-mode phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint2 {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl PhasePoint2 {
    pub fn new(q1: f64, p1: f64, q2: f64, p2: f64) -> Self {
        PhasePoint2 { z1: Complex64::new(q1, p1), z2: Complex64::new(q2, p2) }
    }
}

/// How the `(1-a) I/4` part of the mixture is represented in phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum MixedPartConvention {
    /// Identity on the four-dimensional even/odd subspace; normalizable.
    #[default]
    SubspaceIdentity,
    /// The flat constant `(1-a)/(4π²)`; not integrable for `a < 1`.
    PaperFlat,
}

impl std::str::FromStr for MixedPartConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subspace" | "subspace-identity" => Ok(Self::SubspaceIdentity),
            "paper-flat" | "flat" => Ok(Self::PaperFlat),
            _ => Err(Error::InvalidParameter(format!("unknown convention `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

/// `W_{α,α}(z)` of the normalized state `|α,m⟩`.
pub fn wigner_direct(alpha: Complex64, m: u32, z: Complex64) -> f64 {
    let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
    let d = z * 2.0 - alpha;
    TWO_OVER_PI * parity * laguerre_real(m, d.norm_sqr()) * (-2.0 * (z - alpha).norm_sqr()).exp()
        / laguerre_real(m, -alpha.norm_sqr())
}

/// Wigner function of the operator `|α,m⟩⟨-α,m|`.
pub fn wigner_interference(alpha: Complex64, m: u32, z: Complex64) -> Complex64 {
    let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
    let arg = (z * 2.0 - alpha) * (z * 2.0 + alpha).conj();
    let phase = 4.0 * (z.conj() * alpha).im;
    let envelope = (-2.0 * z.norm_sqr()).exp();
    laguerre(m, arg) * Complex64::from_polar(TWO_OVER_PI * parity * envelope, phase)
        / laguerre_real(m, -alpha.norm_sqr())
}

/// The four real basis functions of one mode with amplitude `xi`:
/// `[W_{ξ,ξ}, W_{-ξ,-ξ}, Re W_{ξ,-ξ}, Im W_{ξ,-ξ}]`.
#[derive(Debug, Clone, Copy)]
pub struct ModeBasis {
    xi: Complex64,
    m: u32,
    parity: f64,
    inv_norm: f64,
}

impl ModeBasis {
    pub fn new(xi: Complex64, m: u32) -> Self {
        ModeBasis {
            xi,
            m,
            parity: if m % 2 == 0 { 1.0 } else { -1.0 },
            inv_norm: 1.0 / laguerre_real(m, -xi.norm_sqr()),
        }
    }

    pub fn eval(&self, z: Complex64) -> [f64; 4] {
        let (xi, m) = (self.xi, self.m);
        let pre = TWO_OVER_PI * self.parity * self.inv_norm;
        let dp = z * 2.0 - xi;
        let dm = z * 2.0 + xi;
        let wp = pre * laguerre_real(m, dp.norm_sqr()) * (-2.0 * (z - xi).norm_sqr()).exp();
        let wm = pre * laguerre_real(m, dm.norm_sqr()) * (-2.0 * (z + xi).norm_sqr()).exp();
        let phase = 4.0 * (z.conj() * xi).im;
        let cross = laguerre(m, dp * dm.conj())
            * Complex64::from_polar(pre * (-2.0 * z.norm_sqr()).exp(), phase);
        [wp, wm, cross.re, cross.im]
    }

    /// Exact plane integrals of the basis functions.
    pub fn integrals(&self) -> [f64; 4] {
        let r = crate::states::photon_added_overlap(self.xi, self.m);
        [1.0, 1.0, r, 0.0]
    }
}

/// Coefficients of `|±_ξ⟩⟨±_ξ|` in the mode basis.
fn cat_coefficients(sign: Sign, xi: Complex64, m: u32) -> Result<[f64; 4]> {
    let n2 = cat_norm(sign, xi, m)?.powi(2);
    let s = sign.factor();
    Ok([n2, n2, 2.0 * s * n2, 0.0])
}

/// Coefficients of `(|+⟩⟨+| + |-⟩⟨-|)/2` in the mode basis.
fn half_identity_coefficients(xi: Complex64, m: u32) -> Result<[f64; 4]> {
    let p = cat_coefficients(Sign::Plus, xi, m)?;
    let q = cat_coefficients(Sign::Minus, xi, m)?;
    Ok([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2]), 0.0])
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Normalized Wigner function of the even or odd cat `|±_α⟩`.
pub fn wigner_cat(sign: Sign, alpha: Complex64, m: u32, z: Complex64) -> Result<f64> {
    let c = cat_coefficients(sign, alpha, m)?;
    Ok(dot4(&c, &ModeBasis::new(alpha, m).eval(z)))
}

/// Precomputed two-mode Wigner function of `ρ(ψ±, a)`.
#[derive(Debug, Clone, Copy)]
pub struct TwoModeWigner {
    pub mode1: ModeBasis,
    pub mode2: ModeBasis,
    pub coef: [[f64; 4]; 4],
    /// Constant offset; nonzero only for the flat convention.
    pub flat: f64,
}

impl TwoModeWigner {
    pub fn new(p: &QuasiWernerParams, convention: MixedPartConvention) -> Result<Self> {
        p.validate()?;
        let n2 = superposition_norm(p.sign, p.alpha, p.beta, p.m)?.powi(2);
        let s = p.sign.factor();
        let mut coef = [[0.0; 4]; 4];
        coef[0][0] = p.a * n2;
        coef[1][1] = p.a * n2;
        coef[2][2] = 2.0 * s * p.a * n2;
        coef[3][3] = -2.0 * s * p.a * n2;
        let mut flat = 0.0;
        if p.a < 1.0 {
            match convention {
                MixedPartConvention::SubspaceIdentity => {
                    let u = half_identity_coefficients(p.alpha, p.m)?;
                    let v = half_identity_coefficients(p.beta, p.m)?;
                    for k in 0..4 {
                        for l in 0..4 {
                            coef[k][l] += (1.0 - p.a) * u[k] * v[l];
                        }
                    }
                }
                MixedPartConvention::PaperFlat => flat = (1.0 - p.a) / (4.0 * PI * PI),
            }
        }
        Ok(TwoModeWigner {
            mode1: ModeBasis::new(p.alpha, p.m),
            mode2: ModeBasis::new(p.beta, p.m),
            coef,
            flat,
        })
    }

    /// `c_l = Σ_k M_kl u_k(z1)`, the mode-2 coefficients at fixed `z1`.
    pub fn contract_first(&self, u: &[f64; 4]) -> [f64; 4] {
        let mut c = [0.0; 4];
        for (k, uk) in u.iter().enumerate() {
            for l in 0..4 {
                c[l] += self.coef[k][l] * uk;
            }
        }
        c
    }

    pub fn eval(&self, z1: Complex64, z2: Complex64) -> f64 {
        let c = self.contract_first(&self.mode1.eval(z1));
        dot4(&c, &self.mode2.eval(z2)) + self.flat
    }
}

/// Two-mode Wigner function of the quasi-Werner state at one point.
pub fn wigner_quasi_werner(p: &QuasiWernerParams, z: PhasePoint2, convention: MixedPartConvention) -> Result<f64> {
    Ok(TwoModeWigner::new(p, convention)?.eval(z.z1, z.z2))
}

/// Reduced single-mode Wigner function, precomputed.
#[derive(Debug, Clone, Copy)]
pub struct ReducedWigner {
    pub basis: ModeBasis,
    pub coef: [f64; 4],
}

impl ReducedWigner {
    pub fn new(p: &QuasiWernerParams, mode: usize, convention: MixedPartConvention) -> Result<Self> {
        p.validate()?;
        if convention == MixedPartConvention::PaperFlat && p.a < 1.0 {
            return Err(Error::NonIntegrableConvention(
                "the flat mixed part has no finite partial trace".into(),
            ));
        }
        let xi = match mode {
            1 => p.alpha,
            2 => p.beta,
            _ => return Err(Error::InvalidParameter(format!("mode index {mode} is not 1 or 2"))),
        };
        let (we, wo) = reduced_weights(p, mode)?;
        let mut coef = [0.0; 4];
        for (w, sign) in [(we, Sign::Plus), (wo, Sign::Minus)] {
            if w == 0.0 {
                continue;
            }
            let c = cat_coefficients(sign, xi, p.m)?;
            for k in 0..4 {
                coef[k] += w * c[k];
            }
        }
        Ok(ReducedWigner { basis: ModeBasis::new(xi, p.m), coef })
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        dot4(&self.coef, &self.basis.eval(z))
    }
}

pub fn reduced_wigner(
    p: &QuasiWernerParams,
    mode: usize,
    z: Complex64,
    convention: MixedPartConvention,
) -> Result<f64> {
    Ok(ReducedWigner::new(p, mode, convention)?.eval(z))
}

/// Default half-width of the integration square.
pub fn default_half_width(alpha: Complex64, beta: Complex64, m: u32) -> f64 {
    2.0 * alpha.norm().max(beta.norm()) + 4.0 + (2.0 * m as f64 + 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WlnResult {
    pub value: f64,
    pub abs_integral: f64,
    pub error_estimate: f64,
    pub evals: u64,
}

/// Sampling step used to locate sign changes of a Wigner function.
pub const SCAN_STEP: f64 = 0.02;

/// WLN of an arbitrary single-mode Wigner function.
pub fn wln_single_mode<F: Fn(Complex64) -> f64>(
    w: F,
    default_r: f64,
    cfg: &QuadratureConfig,
    base: LogBase,
) -> Result<WlnResult> {
    let r = integrate_plane_abs(|q, p| w(Complex64::new(q, p)), cfg, default_r, SCAN_STEP, "single-mode WLN")?;
    Ok(WlnResult {
        value: base.log(r.value.re),
        abs_integral: r.value.re,
        error_estimate: r.error_estimate,
        evals: r.evals,
    })
}

/// WLN of the reduced state of one mode.
pub fn wln_reduced(
    p: &QuasiWernerParams,
    mode: usize,
    convention: MixedPartConvention,
    cfg: &QuadratureConfig,
    base: LogBase,
) -> Result<WlnResult> {
    let rw = ReducedWigner::new(p, mode, convention)?;
    let xi = if mode == 1 { p.alpha } else { p.beta };
    wln_single_mode(|z| rw.eval(z), default_half_width(xi, xi, p.m), cfg, base)
}

/// Plane integral of a single-mode function with the domain-growth policy.
pub fn integrate_single_mode<F: Fn(Complex64) -> f64>(f: F, default_r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(integrate_plane_real(|q, p| f(Complex64::new(q, p)), cfg, default_r, "single-mode integral")?.value.re)
}

/// Tensor-product node set over one phase-space plane with the basis values
/// cached; nodes whose basis values are all negligible are dropped.
struct PlaneNodes {
    weight: Vec<f64>,
    basis: Vec<[f64; 4]>,
}

impl PlaneNodes {
    /// `fold` keeps only `q > 0` (1) or the quadrant `q, p > 0` (2), with the
    /// weights scaled to match; the grid is symmetric about both axes.
    fn new(b: &ModeBasis, r: f64, panel: f64, order: usize, fold: u32) -> Self {
        let panels = 2 * ((r / panel).ceil() as usize);
        let axis = composite_gl(-r, r, panels, order);
        let mut all = Vec::with_capacity(axis.len() * axis.len());
        let mut peak = 0.0f64;
        let scale = (1u32 << fold) as f64;
        for &(q, wq) in &axis {
            if fold >= 1 && q < 0.0 {
                continue;
            }
            for &(pp, wp) in &axis {
                if fold >= 2 && pp < 0.0 {
                    continue;
                }
                let v = b.eval(Complex64::new(q, pp));
                let mag = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
                peak = peak.max(mag);
                all.push((scale * wq * wp, v, mag));
            }
        }
        let cut = PRUNE * peak;
        let (weight, basis) = all.into_iter().filter(|(_, _, mag)| *mag > cut).map(|(w, v, _)| (w, v)).unzip();
        PlaneNodes { weight, basis }
    }
}

fn two_mode_abs_sum(w: &TwoModeWigner, outer: &PlaneNodes, inner: &PlaneNodes) -> f64 {
    let mut total = 0.0;
    for (wi, ui) in outer.weight.iter().zip(&outer.basis) {
        let c = w.contract_first(ui);
        let mut s = 0.0;
        for (wj, vj) in inner.weight.iter().zip(&inner.basis) {
            s += wj * (c[0] * vj[0] + c[1] * vj[1] + c[2] * vj[2] + c[3] * vj[3]).abs();
        }
        total += wi * s;
    }
    total
}

/// Default tolerance for the four-dimensional `∫|W|`.
pub const TWO_MODE_DEFAULT_TOL: f64 = 1e-3;

/// Nodes whose basis values are below this fraction of the peak are dropped.
const PRUNE: f64 = 1e-12;

/// Gauss–Legendre order of the composite panels used in four dimensions.
const TWO_MODE_ORDER: usize = 8;

/// Two-mode WLN.
///
/// The absolute value kills the separable structure, so the integral runs
/// on a tensor product of composite Gauss–Legendre grids, one per mode, with
/// negligible nodes pruned. Starting from half-width `R` and panel width
/// 0.5, the panel width is halved and the square enlarged until both changes
/// fall below `abs_tol`.
pub fn wln_two_mode(
    p: &QuasiWernerParams,
    convention: MixedPartConvention,
    cfg: &QuadratureConfig,
    base: LogBase,
) -> Result<WlnResult> {
    cfg.validate()?;
    if convention == MixedPartConvention::PaperFlat && p.a < 1.0 {
        return Err(Error::NonIntegrableConvention(
            "∫|W| diverges for the flat mixed part with a < 1".into(),
        ));
    }
    let w = TwoModeWigner::new(p, convention)?;
    let mut r = cfg.half_width(default_half_width(p.alpha, p.beta, p.m));
    let mut panel = 0.5;
    // Every component has definite joint parity, so W(-z1, -z2) = W(z1, z2);
    // real amplitudes add W(z1*, z2*) = W(z1, z2).
    let fold = if p.alpha.im == 0.0 && p.beta.im == 0.0 { 2 } else { 1 };
    let eval = |r: f64, panel: f64| {
        let outer = PlaneNodes::new(&w.mode1, r, panel, TWO_MODE_ORDER, fold);
        let inner = PlaneNodes::new(&w.mode2, r, panel, TWO_MODE_ORDER, 0);
        let evals = (outer.weight.len() * inner.weight.len()) as u64;
        (two_mode_abs_sum(&w, &outer, &inner), evals)
    };
    let (mut value, mut evals) = eval(r, panel);
    let mut last_change = f64::NAN;
    for _ in 0..cfg.max_levels {
        let (wider, e1) = eval(r * cfg.refinement_factor, panel);
        let (finer, e2) = eval(r, panel / 2.0);
        evals += e1 + e2;
        let dom = (wider - value).abs();
        let mesh = (finer - value).abs();
        last_change = dom.max(mesh);
        if dom < cfg.abs_tol && mesh < cfg.abs_tol {
            return Ok(WlnResult {
                value: base.log(finer),
                abs_integral: finer,
                error_estimate: last_change,
                evals,
            });
        }
        if dom >= cfg.abs_tol {
            r *= cfg.refinement_factor;
        }
        if mesh >= cfg.abs_tol {
            panel /= 2.0;
        }
        let (v, e) = eval(r, panel);
        value = v;
        evals += e;
    }
    Err(Error::Convergence {
        context: "two-mode WLN".into(),
        levels: cfg.max_levels,
        last_change,
        error_estimate: last_change,
    })
}

/// `∫ W d²z1 d²z2` with each basis integral computed by quadrature.
pub fn two_mode_normalization(
    p: &QuasiWernerParams,
    convention: MixedPartConvention,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let w = TwoModeWigner::new(p, convention)?;
    if w.flat != 0.0 {
        return Err(Error::NonIntegrableConvention("flat term has infinite integral".into()));
    }
    let r = default_half_width(p.alpha, p.beta, p.m);
    let mut iu = [0.0; 4];
    let mut iv = [0.0; 4];
    for k in 0..4 {
        iu[k] = integrate_single_mode(|z| w.mode1.eval(z)[k], r, cfg)?;
        iv[k] = integrate_single_mode(|z| w.mode2.eval(z)[k], r, cfg)?;
    }
    Ok(dot4(&iu, &w.contract_first_transposed(&iv)))
}

impl TwoModeWigner {
    fn contract_first_transposed(&self, v: &[f64; 4]) -> [f64; 4] {
        let mut c = [0.0; 4];
        for k in 0..4 {
            c[k] = dot4(&self.coef[k], v);
        }
        c
    }

    /// Reduced Wigner function of mode 1 obtained by integrating out mode 2
    /// with the exact basis integrals.
    pub fn marginal_first(&self, z1: Complex64) -> f64 {
        let iv = self.mode2.integrals();
        dot4(&self.mode1.eval(z1), &self.contract_first_transposed(&iv))
    }
}

/// Solution of the interference-minimum condition along the `p₂` axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimaLocus {
    pub j: i64,
    /// Right-hand side of `4(p₁α + p₂β) = phase`.
    pub phase: f64,
    /// `β` solving the condition at the given `p₁, p₂`.
    pub beta: f64,
    /// `p₂` solving the condition at the given `β`; `None` when `β = 0`.
    pub p2: Option<f64>,
}

/// Phase condition for the Wigner minima at `q₁ = q₂ = 0`.
///
/// For `+` the condition is `4(p₁α + p₂β) = (2j+1)π`, for `-` it is
/// `4(p₁α + p₂β) = 2jπ`.
pub fn wigner_minima_locus(p: &QuasiWernerParams, p1: f64, p2: f64, j: i64) -> Result<MinimaLocus> {
    if p.alpha.im != 0.0 || p.beta.im != 0.0 {
        return Err(Error::Domain("minima locus needs real amplitudes".into()));
    }
    let phase = match p.sign {
        Sign::Plus => (2 * j + 1) as f64 * PI,
        Sign::Minus => (2 * j) as f64 * PI,
    };
    let (al, be) = (p.alpha.re, p.beta.re);
    if p2 == 0.0 {
        return Err(Error::Domain("p2 = 0 leaves beta undetermined".into()));
    }
    let beta = (phase / 4.0 - p1 * al) / p2;
    let p2_sol = if be != 0.0 { Some((phase / 4.0 - p1 * al) / be) } else { None };
    Ok(MinimaLocus { j, phase, beta, p2: p2_sol })
}

/// One grid axis: either a fixed coordinate or an inclusive linear range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridAxis {
    pub fn fixed(v: f64) -> Self {
        GridAxis { start: v, stop: v, points: 1 }
    }

    pub fn range(start: f64, stop: f64, points: usize) -> Self {
        GridAxis { start, stop, points }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::InvalidParameter(format!("axis {name} has non-finite bounds")));
        }
        match self.points {
            0 => Err(Error::InvalidParameter(format!("axis {name} is empty"))),
            1 if self.start != self.stop => Err(Error::InvalidParameter(format!(
                "axis {name} has distinct bounds but a single point"
            ))),
            _ => Ok(()),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.stop } else { self.start + h * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q1: GridAxis,
    pub p1: GridAxis,
    pub q2: GridAxis,
    pub p2: GridAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub q1: f64,
    pub p1: f64,
    pub q2: f64,
    pub p2: f64,
    pub w: f64,
}

/// Two-mode Wigner values on a row-major grid (`q1` slowest, `p2` fastest).
pub fn wigner_grid(p: &QuasiWernerParams, grid: &GridSpec, convention: MixedPartConvention) -> Result<Vec<GridRow>> {
    for (name, ax) in [("q1", &grid.q1), ("p1", &grid.p1), ("q2", &grid.q2), ("p2", &grid.p2)] {
        ax.validate(name)?;
    }
    let w = TwoModeWigner::new(p, convention)?;
    let (q1s, p1s, q2s, p2s) = (grid.q1.values(), grid.p1.values(), grid.q2.values(), grid.p2.values());
    let mut rows = Vec::with_capacity(q1s.len() * p1s.len() * q2s.len() * p2s.len());
    for &q1 in &q1s {
        for &p1 in &p1s {
            let c = w.contract_first(&w.mode1.eval(Complex64::new(q1, p1)));
            for &q2 in &q2s {
                for &p2 in &p2s {
                    let v = dot4(&c, &w.mode2.eval(Complex64::new(q2, p2))) + w.flat;
                    rows.push(GridRow { q1, p1, q2, p2, w: v });
                }
            }
        }
    }
    Ok(rows)
}
