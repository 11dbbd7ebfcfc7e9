//! Adaptive Gauss–Kronrod quadrature in one and two dimensions plus
//! composite Gauss–Legendre rules.
//!
//! Integrands are complex valued; real integrands go through the `_real`
//! helpers. All reductions run in a fixed order so that results are
//! bit-identical between runs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation and refinement policy for phase-space integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Half-width of the starting square; `None` lets each caller choose a
    /// width from the state parameters.
    pub initial_half_width: Option<f64>,
    /// Growth factor of the square between domain levels.
    pub refinement_factor: f64,
    pub abs_tol: f64,
    pub max_levels: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            initial_half_width: None,
            refinement_factor: 2.0,
            abs_tol: 1e-8,
            max_levels: 4,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(self, abs_tol: f64) -> Self {
        QuadratureConfig { abs_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("abs_tol = {} must be positive", self.abs_tol)));
        }
        if !(self.refinement_factor > 1.0 && self.refinement_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "refinement_factor = {} must exceed 1",
                self.refinement_factor
            )));
        }
        if self.max_levels < 1 {
            return Err(Error::InvalidParameter("max_levels must be at least 1".into()));
        }
        if let Some(r) = self.initial_half_width {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!("initial_half_width = {r} must be positive")));
            }
        }
        Ok(())
    }

    pub(crate) fn half_width(&self, default: f64) -> f64 {
        self.initial_half_width.unwrap_or(default)
    }
}

/// Result of a quadrature with its error bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evals: u64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss–Kronrod 7/15 panel: `(kronrod estimate, |kronrod - gauss|)`.
pub fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Options for the one-dimensional adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive1d {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Width of the initial panels; keeps narrow peaks from being missed.
    pub initial_panel: f64,
    pub max_segments: usize,
}

impl Adaptive1d {
    pub fn new(abs_tol: f64) -> Self {
        Adaptive1d { abs_tol, rel_tol: 0.0, initial_panel: 1.0, max_segments: 4000 }
    }
}

/// Globally adaptive Gauss–Kronrod integration on `[a, b]`.
///
/// The segment with the largest error is bisected until the summed error
/// estimate meets the tolerance. Returns a convergence error only if the
/// segment budget runs out.
pub fn integrate_1d<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, opt: Adaptive1d) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let n0 = ((b - a) / opt.initial_panel).ceil().max(1.0) as usize;
    let step = (b - a) / n0 as f64;
    let mut evals = 0u64;
    for i in 0..n0 {
        let lo = a + step * i as f64;
        let hi = if i + 1 == n0 { b } else { lo + step };
        let (value, error) = gk15(&mut f, lo, hi);
        evals += 15;
        heap.push(Segment { a: lo, b: hi, value, error });
    }
    loop {
        let (total, err) = sum_segments(&heap);
        let target = opt.abs_tol.max(opt.rel_tol * total.norm());
        if err <= target {
            return Ok(Integral { value: total, error_estimate: err, evals });
        }
        if heap.len() >= opt.max_segments {
            return Err(Error::Convergence {
                context: format!("1d adaptive on [{a}, {b}]"),
                levels: heap.len() as u32,
                last_change: f64::NAN,
                error_estimate: err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Segment cannot be split further in floating point.
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evals += 30;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
}

fn sum_segments(heap: &BinaryHeap<Segment>) -> (Complex64, f64) {
    // Sort by position so the sum does not depend on heap layout.
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    segs.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), s| (v + s.value, e + s.error))
}

/// Nested adaptive integration over the rectangle `[x0,x1] × [y0,y1]`.
pub fn integrate_rect<F: FnMut(f64, f64) -> Complex64>(
    mut f: F,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    abs_tol: f64,
) -> Result<Integral> {
    let inner_tol = abs_tol / (4.0 * (x1 - x0));
    let mut evals = 0u64;
    let mut inner_err = 0.0;
    let mut failure = None;
    let outer = integrate_1d(
        |x| {
            if failure.is_some() {
                return Complex64::new(0.0, 0.0);
            }
            match integrate_1d(|y| f(x, y), y0, y1, Adaptive1d::new(inner_tol)) {
                Ok(r) => {
                    evals += r.evals;
                    inner_err = f64::max(inner_err, r.error_estimate);
                    r.value
                }
                Err(e) => {
                    failure = Some(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        x0,
        x1,
        Adaptive1d::new(abs_tol / 2.0),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Integral {
        value: outer.value,
        error_estimate: outer.error_estimate + inner_err * (x1 - x0),
        evals,
    })
}

/// Integral over the plane with the domain-growth test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneIntegral {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evals: u64,
    pub half_width: f64,
    pub levels: u32,
}

/// Integrates `f(q, p)` over the plane.
///
/// The square `[-R, R]²` is integrated to `abs_tol/4`, then enlarged by the
/// refinement factor until two successive squares agree to `abs_tol`.
pub fn integrate_plane<F: FnMut(f64, f64) -> Complex64>(
    mut f: F,
    cfg: &QuadratureConfig,
    default_half_width: f64,
    context: &str,
) -> Result<PlaneIntegral> {
    grow_square(|r, tol| integrate_rect(&mut f, (-r, r), (-r, r), tol), cfg, default_half_width, context)
}

/// `∫∫ |f(q, p)| dq dp` over the plane.
///
/// Each inner line is split at the sign changes of `f` found on a scan of
/// spacing `scan_step`, so the kinks of `|f|` sit on panel edges.
pub fn integrate_plane_abs<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    cfg: &QuadratureConfig,
    default_half_width: f64,
    scan_step: f64,
    context: &str,
) -> Result<PlaneIntegral> {
    grow_square(
        |r, tol| {
            let inner_tol = tol / (4.0 * 2.0 * r);
            let mut evals = 0u64;
            let mut inner_err = 0.0f64;
            let mut failure = None;
            let outer = integrate_1d(
                |x| {
                    if failure.is_some() {
                        return Complex64::new(0.0, 0.0);
                    }
                    match integrate_abs_1d(|y| f(x, y), -r, r, inner_tol, scan_step) {
                        Ok(v) => {
                            evals += v.evals;
                            inner_err = inner_err.max(v.error_estimate);
                            v.value
                        }
                        Err(e) => {
                            failure = Some(e);
                            Complex64::new(0.0, 0.0)
                        }
                    }
                },
                -r,
                r,
                Adaptive1d::new(tol / 2.0),
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(Integral { value: outer.value, error_estimate: outer.error_estimate + inner_err * 2.0 * r, evals })
        },
        cfg,
        default_half_width,
        context,
    )
}

/// `∫ |f|` on `[a, b]`, splitting at bracketed sign changes.
pub fn integrate_abs_1d<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, scan_step: f64) -> Result<Integral> {
    if !(scan_step > 0.0) {
        return Err(Error::InvalidParameter(format!("scan step {scan_step} must be positive")));
    }
    let n = ((b - a) / scan_step).ceil().max(1.0) as usize;
    // A kink this small cannot move the integral by more than a tiny
    // fraction of the tolerance.
    let negligible = 1e-3 * abs_tol / (b - a);
    let mut cuts = vec![a];
    let mut evals = n as u64 + 1;
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 1..=n {
        let x1 = if i == n { b } else { a + (b - a) * i as f64 / n as f64 };
        let f1 = f(x1);
        if f0 * f1 < 0.0 && f0.abs().max(f1.abs()) > negligible {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            while hi - lo > 4.0 * f64::EPSILON * hi.abs().max(1.0) {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                evals += 1;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            cuts.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    cuts.push(b);
    let piece_tol = abs_tol / (cuts.len() - 1) as f64;
    let mut total = Integral { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, evals };
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let r = integrate_1d(|x| Complex64::new(f(x).abs(), 0.0), w[0], w[1], Adaptive1d::new(piece_tol))?;
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.evals += r.evals;
    }
    Ok(total)
}

fn grow_square<R: FnMut(f64, f64) -> Result<Integral>>(
    mut rect: R,
    cfg: &QuadratureConfig,
    default_half_width: f64,
    context: &str,
) -> Result<PlaneIntegral> {
    cfg.validate()?;
    let mut r = cfg.half_width(default_half_width);
    let tol = cfg.abs_tol / 4.0;
    let mut prev = rect(r, tol)?;
    let mut evals = prev.evals;
    let mut last_change = f64::NAN;
    for level in 1..=cfg.max_levels {
        r *= cfg.refinement_factor;
        let cur = rect(r, tol)?;
        evals += cur.evals;
        last_change = (cur.value - prev.value).norm();
        if last_change < cfg.abs_tol {
            return Ok(PlaneIntegral {
                value: cur.value,
                error_estimate: cur.error_estimate + last_change,
                evals,
                half_width: r,
                levels: level,
            });
        }
        prev = cur;
    }
    Err(Error::Convergence {
        context: context.to_string(),
        levels: cfg.max_levels,
        last_change,
        error_estimate: prev.error_estimate,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `order` nodes.
pub fn composite_gl(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let c = a + h * (p as f64 + 0.5);
        for (xi, wi) in x.iter().zip(&w) {
            out.push((c + 0.5 * h * xi, 0.5 * h * wi));
        }
    }
    out
}

/// Real-valued convenience wrapper for [`integrate_plane`].
pub fn integrate_plane_real<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    cfg: &QuadratureConfig,
    default_half_width: f64,
    context: &str,
) -> Result<PlaneIntegral> {
    integrate_plane(|q, p| Complex64::new(f(q, p), 0.0), cfg, default_half_width, context)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn adaptive_handles_gaussian_and_kink() {
        let g = integrate_1d(|x| re((-x * x).exp()), -10.0, 10.0, Adaptive1d::new(1e-13)).unwrap();
        assert!((g.value.re - PI.sqrt()).abs() < 1e-12);
        let k = integrate_1d(|x| re((x - 0.3).abs()), -1.0, 1.0, Adaptive1d::new(1e-12)).unwrap();
        assert!((k.value.re - (1.3f64.powi(2) + 0.7f64.powi(2)) / 2.0).abs() < 1e-11);
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        let opt = Adaptive1d { max_segments: 3, ..Adaptive1d::new(1e-15) };
        let r = integrate_1d(|x| re(x.abs().sqrt()), -1.0, 1.0, opt);
        assert!(matches!(r, Err(Error::Convergence { .. })));
    }

    #[test]
    fn plane_gaussian() {
        let cfg = QuadratureConfig::default();
        let r = integrate_plane_real(|q, p| (-(q * q + p * p)).exp() / PI, &cfg, 6.0, "gauss").unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-9);
        assert_eq!(r.levels, 1);
    }

    #[test]
    fn plane_reports_slow_tail() {
        let cfg = QuadratureConfig { max_levels: 2, ..QuadratureConfig::default() };
        let r = integrate_plane_real(|q, p| 1.0 / (1.0 + q * q + p * p).powi(2), &cfg, 2.0, "tail");
        assert!(matches!(r, Err(Error::Convergence { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        assert!(QuadratureConfig { abs_tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(QuadratureConfig { refinement_factor: 1.0, ..Default::default() }.validate().is_err());
        assert!(QuadratureConfig { max_levels: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn composite_rule_is_exact_for_cubics() {
        let nodes = composite_gl(-2.0, 3.0, 7, 2);
        let s: f64 = nodes.iter().map(|(x, w)| w * x.powi(3)).sum();
        assert!((s - (81.0 - 16.0) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn abs_integral_of_fock_one() {
        let w = |x: f64, y: f64| {
            let r2 = x * x + y * y;
            (2.0 / PI) * (4.0 * r2 - 1.0) * (-2.0 * r2).exp()
        };
        let r = integrate_plane_abs(w, &QuadratureConfig::default(), 6.0, 0.02, "fock").unwrap();
        assert!((r.value.re - (4.0 * (-0.5f64).exp() - 1.0)).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn abs_1d_splits_at_roots() {
        let r = integrate_abs_1d(|x| x.sin(), 0.0, 3.0 * PI, 1e-12, 0.1).unwrap();
        assert!((r.value.re - 6.0).abs() < 1e-11);
    }
}
