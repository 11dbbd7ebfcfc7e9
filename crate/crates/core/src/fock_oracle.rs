//! Brute-force truncated Fock-space implementation of the states and
//! measures, used only to certify the closed forms.
//!
//! Nothing here calls the closed-form evaluators: states are built by
//! applying creation operators to Poisson amplitudes and normalizing
//! numerically, displacements come from the exact column recurrence of
//! `D(z)`, and two-qubit measures act on projected 4×4 matrices.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use num_complex::Complex64;

use crate::correlations::{MeasurementAngles, QubitDensity4};
use crate::error::{Error, Result};
use crate::quadrature::composite_gl;
use crate::specfun::Sign;
use crate::states::QuasiWernerParams;
use crate::teleport::InputState;

const TAIL_BOUND: f64 = 1e-12;
const MAX_CUTOFF: usize = 512;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Truncated single-mode state `Σ_{n ≤ N} c_n |n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub cutoff: usize,
    pub coeffs: DVector<Complex64>,
}

impl FockVector {
    /// Probability in the top 10% of the retained range.
    pub fn tail_mass(&self) -> f64 {
        let n = self.coeffs.len();
        let start = n - (n / 10).max(1);
        self.coeffs.iter().skip(start).map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    fn certify(self) -> Result<Self> {
        let tail = self.tail_mass();
        if tail >= TAIL_BOUND {
            return Err(Error::TailMass { cutoff: self.cutoff, tail });
        }
        Ok(self)
    }
}

/// `N = m + ⌈|α|²⌉ + ⌈6|α|⌉ + 10`.
pub fn default_cutoff(alpha_abs: f64, m: u32) -> usize {
    m as usize + (alpha_abs * alpha_abs).ceil() as usize + (6.0 * alpha_abs).ceil() as usize + 10
}

/// `a†^m |α⟩` normalized, at the given cutoff.
pub fn build_pacs(alpha: Complex64, m: u32, cutoff: usize) -> Result<FockVector> {
    let n = cutoff + 1;
    let mut c = DVector::from_element(n, zero());
    // Poisson amplitudes; the global e^{-|α|²/2} drops out on normalization.
    let mut amp = Complex64::new(1.0, 0.0);
    c[0] = amp;
    for k in 1..n {
        amp *= alpha / (k as f64).sqrt();
        c[k] = amp;
    }
    for _ in 0..m {
        let mut next = DVector::from_element(n, zero());
        for k in 1..n {
            next[k] = c[k - 1] * (k as f64).sqrt();
        }
        c = next;
    }
    let norm = c.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateState("photon-added state has no weight".into()));
    }
    FockVector { cutoff, coeffs: c / Complex64::new(norm, 0.0) }.certify()
}

/// [`build_pacs`] at the default cutoff (at least `min_cutoff`), doubled
/// until the tail certificate passes.
pub fn build_pacs_auto(alpha: Complex64, m: u32, min_cutoff: usize) -> Result<FockVector> {
    let mut cutoff = default_cutoff(alpha.norm(), m).max(min_cutoff);
    loop {
        match build_pacs(alpha, m, cutoff) {
            Err(Error::TailMass { .. }) if cutoff < MAX_CUTOFF => cutoff *= 2,
            other => return other,
        }
    }
}

/// `⟨j|D(z)|k⟩` for `j, k ≤ N`.
///
/// Column 0 is the coherent state `|z⟩`; further columns follow from
/// `D|k⟩ = (a† - z*) D|k-1⟩ / √k`, which involves only entries inside the
/// retained block.
pub fn displacement_matrix(z: Complex64, cutoff: usize) -> Result<DMatrix<Complex64>> {
    let limit = cutoff as f64 / 4.0;
    if z.norm() > limit {
        return Err(Error::AccuracyGuard { z_abs: z.norm(), limit });
    }
    let n = cutoff + 1;
    let mut d = DMatrix::from_element(n, n, zero());
    let mut amp = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    d[(0, 0)] = amp;
    for j in 1..n {
        amp *= z / (j as f64).sqrt();
        d[(j, 0)] = amp;
    }
    let zc = z.conj();
    for k in 1..n {
        let sk = (k as f64).sqrt();
        for j in 0..n {
            let up = if j > 0 { d[(j - 1, k - 1)] * (j as f64).sqrt() } else { zero() };
            d[(j, k)] = (up - zc * d[(j, k - 1)]) / sk;
        }
    }
    Ok(d)
}

fn parity_vec(n: usize) -> DVector<f64> {
    DVector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { -1.0 })
}

/// Wigner function of a pure single-mode state.
///
/// Uses `D(z) Π D(-z) = D(2z) Π`, so `W(z) = (2/π) ⟨ψ| D(2z) Π |ψ⟩`.
pub fn wigner_fock(v: &FockVector, z: Complex64) -> Result<f64> {
    let d = displacement_matrix(z * 2.0, v.cutoff)?;
    let par = parity_vec(v.coeffs.len());
    let pv = v.coeffs.component_mul(&par.map(|x| Complex64::new(x, 0.0)));
    let val = v.coeffs.dotc(&(d * pv)) * (2.0 / PI);
    imaginary_check(val, "single-mode Wigner")
}

/// Wigner function of a single-mode density matrix.
pub fn wigner_fock_density(rho: &DMatrix<Complex64>, z: Complex64) -> Result<f64> {
    let n = rho.nrows();
    let d = displacement_matrix(z * 2.0, n - 1)?;
    let mut acc = zero();
    for k in 0..n {
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        // (ρ D(2z))_{kk}
        acc += s * rho.row(k).transpose().dot(&d.column(k));
    }
    imaginary_check(acc * (2.0 / PI), "single-mode Wigner")
}

fn imaginary_check(v: Complex64, what: &str) -> Result<f64> {
    if v.im.abs() > 1e-10 * v.re.abs().max(1.0) {
        return Err(Error::InvalidDensity(format!("{what} has imaginary residue {:.3e}", v.im)));
    }
    Ok(v.re)
}

/// Two-mode mixed state as a weighted ensemble of pure states; each pure
/// state is stored as its coefficient matrix `V_ij = ⟨i,j|ψ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeDensity {
    pub cutoff: usize,
    pub components: Vec<(f64, DMatrix<Complex64>)>,
}

impl TwoModeDensity {
    /// Dense `(N+1)² × (N+1)²` matrix with index `i (N+1) + j`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.cutoff + 1;
        let mut rho = DMatrix::from_element(n * n, n * n, zero());
        for (w, v) in &self.components {
            let flat = DVector::from_fn(n * n, |r, _| v[(r / n, r % n)]);
            rho += (&flat * flat.adjoint()) * Complex64::new(*w, 0.0);
        }
        rho
    }

    pub fn trace(&self) -> f64 {
        self.components.iter().map(|(w, v)| w * v.norm_squared()).sum()
    }

    /// Reduced density matrix of mode 1 or 2.
    pub fn partial_trace(&self, keep: usize) -> DMatrix<Complex64> {
        let n = self.cutoff + 1;
        let mut r = DMatrix::from_element(n, n, zero());
        for (w, v) in &self.components {
            let part = if keep == 1 { v * v.adjoint() } else { v.transpose() * v.conjugate() };
            r += part * Complex64::new(*w, 0.0);
        }
        r
    }

    /// `W(z1, z2) = (2/π)² tr[ρ D(2z1)Π ⊗ D(2z2)Π]`.
    pub fn wigner(&self, z1: Complex64, z2: Complex64) -> Result<f64> {
        let n = self.cutoff + 1;
        let d1 = displacement_matrix(z1 * 2.0, self.cutoff)?;
        let d2 = displacement_matrix(z2 * 2.0, self.cutoff)?;
        let mut acc = zero();
        for (w, v) in &self.components {
            let pv = DMatrix::from_fn(n, n, |i, j| if (i + j) % 2 == 0 { v[(i, j)] } else { -v[(i, j)] });
            let moved = &d1 * pv * d2.transpose();
            acc += *w * v.zip_fold(&moved, zero(), |s, a, b| s + a.conj() * b);
        }
        imaginary_check(acc * (4.0 / (PI * PI)), "two-mode Wigner")
    }

    /// `tr[ρ D(z1) ⊗ D(z2)]`.
    pub fn char_fn(&self, z1: Complex64, z2: Complex64) -> Result<Complex64> {
        let d1 = displacement_matrix(z1, self.cutoff)?;
        let d2 = displacement_matrix(z2, self.cutoff)?;
        let mut acc = zero();
        for (w, v) in &self.components {
            let moved = &d1 * v * d2.transpose();
            acc += *w * v.zip_fold(&moved, zero(), |s, a, b| s + a.conj() * b);
        }
        Ok(acc)
    }
}

/// `tr[ρ D(z1) ⊗ D(z2)]` evaluated by matrix contraction.
pub fn char_fn_fock(rho: &TwoModeDensity, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    rho.char_fn(z1, z2)
}

fn pad(v: &FockVector, cutoff: usize) -> DVector<Complex64> {
    let mut out = DVector::from_element(cutoff + 1, zero());
    out.rows_mut(0, v.coeffs.len()).copy_from(&v.coeffs);
    out
}

fn normalized(v: DVector<Complex64>, what: &str) -> Result<DVector<Complex64>> {
    let n = v.norm();
    if n < 1e-150 {
        return Err(Error::DegenerateState(format!("{what} vanishes")));
    }
    Ok(v / Complex64::new(n, 0.0))
}

/// Even and odd photon-added cats of one mode, numerically normalized.
pub struct CatPair {
    pub even: DVector<Complex64>,
    pub odd: Option<DVector<Complex64>>,
}

/// The four-dimensional even/odd basis of both modes, all padded to one
/// common cutoff.
pub struct OracleBasis {
    pub cutoff: usize,
    pub alpha_pacs: (DVector<Complex64>, DVector<Complex64>),
    pub beta_pacs: (DVector<Complex64>, DVector<Complex64>),
    pub alpha_cats: CatPair,
    pub beta_cats: CatPair,
}

/// How the oracle picks its Fock cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cutoff {
    /// Default rule, at least `min`, doubled until certified.
    Auto { min: usize },
    /// Exactly this cutoff; an uncertified tail is an error.
    Fixed(usize),
}

impl Cutoff {
    fn build(self, alpha: Complex64, m: u32) -> Result<FockVector> {
        match self {
            Cutoff::Auto { min } => build_pacs_auto(alpha, m, min),
            Cutoff::Fixed(n) => build_pacs(alpha, m, n),
        }
    }
}

impl OracleBasis {
    pub fn new(alpha: Complex64, beta: Complex64, m: u32, min_cutoff: usize) -> Result<Self> {
        Self::with_cutoff(alpha, beta, m, Cutoff::Auto { min: min_cutoff })
    }

    pub fn with_cutoff(alpha: Complex64, beta: Complex64, m: u32, policy: Cutoff) -> Result<Self> {
        let vs = [
            policy.build(alpha, m)?,
            policy.build(-alpha, m)?,
            policy.build(beta, m)?,
            policy.build(-beta, m)?,
        ];
        let cutoff = vs.iter().map(|v| v.cutoff).max().unwrap_or(0);
        let [ap, am, bp, bm] = vs.map(|v| pad(&v, cutoff));
        let cats = |p: &DVector<Complex64>, q: &DVector<Complex64>| -> Result<CatPair> {
            let even = normalized(p + q, "even cat")?;
            let odd = normalized(p - q, "odd cat").ok();
            Ok(CatPair { even, odd })
        };
        Ok(OracleBasis {
            cutoff,
            alpha_cats: cats(&ap, &am)?,
            beta_cats: cats(&bp, &bm)?,
            alpha_pacs: (ap, am),
            beta_pacs: (bp, bm),
        })
    }

    fn cat(&self, mode: usize, odd: bool) -> Result<&DVector<Complex64>> {
        let pair = if mode == 1 { &self.alpha_cats } else { &self.beta_cats };
        if odd {
            pair.odd.as_ref().ok_or_else(|| Error::DegenerateState("odd cat vanishes".into()))
        } else {
            Ok(&pair.even)
        }
    }

    /// Product basis in the order `++, +-, -+, --`.
    pub fn product_state(&self, index: usize) -> Result<DMatrix<Complex64>> {
        let x = self.cat(1, index >= 2)?;
        let y = self.cat(2, index % 2 == 1)?;
        Ok(x * y.transpose())
    }
}

/// `ρ(ψ±, a)` realized in truncated Fock space.
pub fn quasi_werner_density(p: &QuasiWernerParams, min_cutoff: usize) -> Result<(TwoModeDensity, OracleBasis)> {
    quasi_werner_density_with(p, Cutoff::Auto { min: min_cutoff })
}

pub fn quasi_werner_density_with(p: &QuasiWernerParams, policy: Cutoff) -> Result<(TwoModeDensity, OracleBasis)> {
    p.validate()?;
    let basis = OracleBasis::with_cutoff(p.alpha, p.beta, p.m, policy)?;
    let (ap, am) = &basis.alpha_pacs;
    let (bp, bm) = &basis.beta_pacs;
    let s = Complex64::new(p.sign.factor(), 0.0);
    let psi = ap * bp.transpose() + (am * bm.transpose()) * s;
    let nrm = psi.norm();
    if nrm < 1e-150 {
        return Err(Error::DegenerateState("superposition vanishes".into()));
    }
    let psi = psi / Complex64::new(nrm, 0.0);
    let mut components = vec![(p.a, psi)];
    if p.a < 1.0 {
        for k in 0..4 {
            components.push(((1.0 - p.a) / 4.0, basis.product_state(k)?));
        }
    }
    Ok((TwoModeDensity { cutoff: basis.cutoff, components }, basis))
}

/// Single-mode density of `|±_ξ⟩` or of a photon-added coherent state.
pub fn pure_density(v: &DVector<Complex64>) -> DMatrix<Complex64> {
    v * v.adjoint()
}

/// Projection of a two-mode density onto the even/odd product basis.
pub fn project_to_qubits(rho: &TwoModeDensity, basis: &OracleBasis) -> Result<QubitDensity4> {
    let mut states = Vec::with_capacity(4);
    for k in 0..4 {
        states.push(basis.product_state(k)?);
    }
    let mut out = Matrix4::from_element(zero());
    for (w, v) in &rho.components {
        let amps: Vec<Complex64> = states.iter().map(|e| e.zip_fold(v, zero(), |s, a, b| s + a.conj() * b)).collect();
        for i in 0..4 {
            for j in 0..4 {
                out[(i, j)] += *w * amps[i] * amps[j].conj();
            }
        }
    }
    Ok(QubitDensity4(out))
}

fn hermitian_eigenvalues4(m: &Matrix4<Complex64>) -> [f64; 4] {
    let e = m.symmetric_eigen().eigenvalues;
    [e[0], e[1], e[2], e[3]]
}

fn check_density(rho: &QubitDensity4) -> Result<()> {
    rho.validate()
}

/// Relative size below which eigenvalues of `ρ` count as exact zeros when
/// factoring `ρ = B B†`.
const RANK_FLOOR: f64 = 1e-13;

/// Wootters concurrence `max(0, λ1 - λ2 - λ3 - λ4)`.
///
/// With `ρ = B B†` the `λ_i` (square roots of the eigenvalues of `ρ ρ̃`) are
/// the singular values of `Bᵀ (σy⊗σy) B`, which avoids taking square roots
/// of rounding noise for rank-deficient states.
pub fn wootters_concurrence(rho: &QubitDensity4) -> Result<f64> {
    check_density(rho)?;
    let eig = rho.0.symmetric_eigen();
    let top = eig.eigenvalues.max();
    let cols: Vec<DVector<Complex64>> = (0..4)
        .filter(|&k| eig.eigenvalues[k] > RANK_FLOOR * top)
        .map(|k| DVector::from_fn(4, |i, _| eig.eigenvectors[(i, k)] * eig.eigenvalues[k].sqrt()))
        .collect();
    let b = DMatrix::from_columns(&cols);
    let sy = Matrix2::new(zero(), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), zero());
    let yy = sy.kronecker(&sy);
    let yy = DMatrix::from_fn(4, 4, |i, j| yy[(i, j)]);
    let c = b.transpose() * yy * &b;
    let mut l: Vec<f64> = c.singular_values().iter().copied().collect();
    l.resize(4, 0.0);
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

fn von_neumann_bits(vals: &[f64]) -> f64 {
    vals.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// Conditional states of qubit X after measuring Y along `angles`.
///
/// Returns `[(p0, ρ0), (p1, ρ1)]` with projectors
/// `|π0⟩ = cos θ|0⟩ + e^{iφ} sin θ|1⟩` and
/// `|π1⟩ = e^{-iφ} sin θ|0⟩ - cos θ|1⟩`.
pub fn measure_second(rho: &QubitDensity4, angles: MeasurementAngles) -> [(f64, Matrix2<Complex64>); 2] {
    let (c, s) = (angles.theta.cos(), angles.theta.sin());
    let e = Complex64::from_polar(1.0, angles.phi);
    let proj = [
        [Complex64::new(c, 0.0), e * s],
        [e.conj() * s, Complex64::new(-c, 0.0)],
    ];
    let r = &rho.0;
    let mut out = [(0.0, Matrix2::from_element(zero())); 2];
    for (k, pk) in proj.iter().enumerate() {
        let mut m = Matrix2::from_element(zero());
        for x in 0..2 {
            for xp in 0..2 {
                let mut acc = zero();
                for t in 0..2 {
                    for tp in 0..2 {
                        acc += pk[t].conj() * r[(2 * x + t, 2 * xp + tp)] * pk[tp];
                    }
                }
                m[(x, xp)] = acc;
            }
        }
        let p = (m[(0, 0)] + m[(1, 1)]).re;
        out[k] = (p, if p > 0.0 { m / Complex64::new(p, 0.0) } else { m });
    }
    out
}

fn measured_conditional_entropy(rho: &QubitDensity4, angles: MeasurementAngles) -> f64 {
    measure_second(rho, angles)
        .iter()
        .filter(|(p, _)| *p > 0.0)
        .map(|(p, m)| {
            let e = m.symmetric_eigen().eigenvalues;
            p * von_neumann_bits(&[e[0], e[1]])
        })
        .sum()
}

fn reduced_second(rho: &QubitDensity4) -> Matrix2<Complex64> {
    let r = &rho.0;
    Matrix2::from_fn(|t, tp| r[(t, tp)] + r[(2 + t, 2 + tp)])
}

/// Discord with measurement on Y by exhaustive search over `(θ, φ)` followed
/// by golden-section polishing in `θ`.
pub fn discord_bruteforce(rho: &QubitDensity4, n_theta: usize, n_phi: usize) -> Result<f64> {
    check_density(rho)?;
    if n_theta < 2 || n_phi < 1 {
        return Err(Error::InvalidParameter("discord grid too small".into()));
    }
    let s_joint = von_neumann_bits(&hermitian_eigenvalues4(&rho.0));
    let ey = reduced_second(rho).symmetric_eigen().eigenvalues;
    let s_y = von_neumann_bits(&[ey[0], ey[1]]);
    let half_pi = PI / 2.0;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..n_theta {
        let theta = half_pi * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            let v = measured_conditional_entropy(rho, MeasurementAngles { theta, phi });
            if v < best.0 {
                best = (v, theta, phi);
            }
        }
    }
    let step = half_pi / (n_theta - 1) as f64;
    let phi = best.2;
    let f = |t: f64| measured_conditional_entropy(rho, MeasurementAngles { theta: t, phi });
    let (mut lo, mut hi) = ((best.1 - step).max(0.0), (best.1 + step).min(half_pi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(x1) <= f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let polished = f(0.5 * (lo + hi)).min(best.0);
    Ok(s_y - s_joint + polished)
}

/// Fidelity integral with the channel characteristic function taken from
/// the truncated density, on a fixed tensor Gauss–Legendre grid over
/// `[-R, R]²`.
pub fn fidelity_quadrature_oracle(
    input: &InputState,
    rho: &TwoModeDensity,
    half_width: f64,
    panels: usize,
    order: usize,
) -> Result<f64> {
    let axis = composite_gl(-half_width, half_width, panels, order);
    let mut acc = zero();
    for &(x, wx) in &axis {
        for &(y, wy) in &axis {
            let mu = Complex64::new(x, y);
            let w = input.chi(mu) * input.chi(-mu);
            if w.norm() < 1e-300 {
                continue;
            }
            acc += w * rho.char_fn(-mu.conj(), -mu)? * (wx * wy);
        }
    }
    Ok(acc.re / PI)
}

/// Cutoff that keeps the displacement guard satisfied up to `|z| = r`.
pub fn cutoff_for_radius(r: f64) -> usize {
    (4.0 * r).ceil() as usize
}

/// Sign-aware helper for tests: `|ψ±⟩` assembled from the basis with the
/// coefficients `(c0, c1)`.
pub fn assemble_from_basis(basis: &OracleBasis, sign: Sign, c0: f64, c1: f64) -> Result<DMatrix<Complex64>> {
    let (i0, i1) = match sign {
        Sign::Plus => (0, 3),
        Sign::Minus => (1, 2),
    };
    let mut out = basis.product_state(i0)? * Complex64::new(c0, 0.0);
    if c1 != 0.0 {
        out += basis.product_state(i1)? * Complex64::new(c1, 0.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pacs_examples() {
        let v = build_pacs(c(0.0, 0.0), 0, 12).unwrap();
        assert_eq!(v.coeffs[0], c(1.0, 0.0));
        let v = build_pacs(c(0.0, 0.0), 3, 12).unwrap();
        assert!((v.coeffs[3] - c(1.0, 0.0)).norm() < 1e-15);
        // ‖a†|α⟩‖² = 1! L₁(-1) = 2 for α = 1
        let n = 40;
        let mut coh = vec![c(0.0, 0.0); n + 1];
        let mut amp = (-0.5f64).exp();
        for k in 0..=n {
            if k > 0 {
                amp /= (k as f64).sqrt();
            }
            coh[k] = c(amp, 0.0);
        }
        let norm2: f64 = (1..=n).map(|k| k as f64 * coh[k - 1].norm_sqr()).sum();
        assert!((norm2 - 2.0).abs() < 1e-13);
    }

    #[test]
    fn pacs_tail_certificate() {
        assert!(matches!(build_pacs(c(3.0, 0.0), 2, 8), Err(Error::TailMass { .. })));
        let v = build_pacs_auto(c(3.0, 0.0), 2, 0).unwrap();
        assert!(v.tail_mass() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn displacement_examples() {
        let d = displacement_matrix(c(0.0, 0.0), 10).unwrap();
        assert!((d - DMatrix::identity(11, 11)).norm() < 1e-15);
        let z = c(0.7, -0.4);
        let d = displacement_matrix(z, 30).unwrap();
        assert!((d[(0, 0)].re - (-0.5 * z.norm_sqr()).exp()).abs() < 1e-15);
        let dm = displacement_matrix(-z, 30).unwrap();
        let prod = &d * &dm;
        let safe = 14;
        let block = prod.view((0, 0), (safe, safe)).into_owned();
        assert!((block - DMatrix::identity(safe, safe)).norm() < 1e-8);
        let u = d.adjoint() * &d;
        assert!((u.view((0, 0), (safe, safe)).into_owned() - DMatrix::identity(safe, safe)).norm() < 1e-8);
        assert!(matches!(displacement_matrix(c(5.0, 0.0), 12), Err(Error::AccuracyGuard { .. })));
    }

    #[test]
    fn displacement_diagonal_matches_laguerre() {
        let z = c(0.9, 0.3);
        let d = displacement_matrix(z, 20).unwrap();
        for m in 0..6 {
            let want = (-0.5 * z.norm_sqr()).exp() * crate::specfun::laguerre_real(m, z.norm_sqr());
            assert!((d[(m as usize, m as usize)] - c(want, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn wigner_examples() {
        let vac = build_pacs(c(0.0, 0.0), 0, 16).unwrap();
        assert!((wigner_fock(&vac, c(0.0, 0.0)).unwrap() - 2.0 / PI).abs() < 1e-15);
        let one = build_pacs(c(0.0, 0.0), 1, 16).unwrap();
        assert!((wigner_fock(&one, c(0.0, 0.0)).unwrap() + 2.0 / PI).abs() < 1e-15);
        let rho = pure_density(&one.coeffs);
        let z = c(0.3, 0.2);
        assert!((wigner_fock_density(&rho, z).unwrap() - wigner_fock(&one, z).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn char_fn_examples() {
        let p = QuasiWernerParams::real(0.0, 0.0, 0, 1.0, Sign::Plus).unwrap();
        let (rho, _) = quasi_werner_density(&p, 16).unwrap();
        assert!((rho.char_fn(c(0.0, 0.0), c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let (z1, z2) = (c(0.4, 0.1), c(-0.3, 0.8));
        let want = (-0.5 * z1.norm_sqr() - 0.5 * z2.norm_sqr()).exp();
        assert!((rho.char_fn(z1, z2).unwrap() - c(want, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn density_trace_and_partial_trace() {
        let p = QuasiWernerParams::real(0.5, 0.7, 1, 0.6, Sign::Minus).unwrap();
        let (rho, _) = quasi_werner_density(&p, 0).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        let r1 = rho.partial_trace(1);
        assert!((r1.trace() - c(1.0, 0.0)).norm() < 1e-12);
        let dense = rho.to_dense();
        assert!((dense.trace() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn wootters_examples() {
        let id = QubitDensity4(Matrix4::identity() * c(0.25, 0.0));
        assert!(wootters_concurrence(&id).unwrap().abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = nalgebra::Vector4::new(c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0));
        let b = QubitDensity4(bell * bell.adjoint());
        assert!((wootters_concurrence(&b).unwrap() - 1.0).abs() < 1e-7);
        let bad = QubitDensity4(Matrix4::from_diagonal(&nalgebra::Vector4::new(c(1.2, 0.0), c(-0.2, 0.0), c(0.0, 0.0), c(0.0, 0.0))));
        assert!(matches!(wootters_concurrence(&bad), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn discord_examples() {
        let id = QubitDensity4(Matrix4::identity() * c(0.25, 0.0));
        assert!(discord_bruteforce(&id, 91, 8).unwrap().abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = nalgebra::Vector4::new(c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0));
        let b = QubitDensity4(bell * bell.adjoint());
        assert!((discord_bruteforce(&b, 91, 8).unwrap() - 1.0).abs() < 1e-9);
    }
}
