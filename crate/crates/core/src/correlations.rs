//! Two-qubit correlation measures of the quasi-Werner family in the
//! even/odd product basis: concurrence, entanglement of formation, mutual
//! information and discord with projective measurements on mode Y.
//!
//! Entropies are in bits.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{binary_entropy, xlog2x_neg, Sign};
use crate::states::{schmidt_amplitudes, QuasiWernerParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAngles {
    pub theta: f64,
    pub phi: f64,
}

/// 4×4 density in the ordered basis `++, +-, -+, --`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensity4(pub Matrix4<Complex64>);

impl QubitDensity4 {
    pub fn validate(&self) -> Result<()> {
        let r = &self.0;
        let herm = (r - r.adjoint()).norm();
        if herm > 1e-12 {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = r.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min = r.symmetric_eigen().eigenvalues.min();
        if min < -1e-10 {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let e = self.0.symmetric_eigen().eigenvalues;
        [e[0], e[1], e[2], e[3]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub concurrence: f64,
    pub eof: f64,
    pub discord: f64,
    pub mutual_information: f64,
    pub optimal_angles: MeasurementAngles,
    pub optimizer_evals: u64,
}

/// Exact `(1-a) I/4 + a |ψ±⟩⟨ψ±|`.
pub fn density_matrix(p: &QuasiWernerParams) -> Result<QubitDensity4> {
    let s = schmidt_amplitudes(p)?;
    let (i0, i1) = match p.sign {
        Sign::Plus => (0, 3),
        Sign::Minus => (1, 2),
    };
    let mut psi = [0.0; 4];
    psi[i0] = s.chi0 / 2.0;
    psi[i1] = s.chi1 / 2.0;
    let r = Matrix4::from_fn(|i, j| {
        let mixed = if i == j { (1.0 - p.a) / 4.0 } else { 0.0 };
        Complex64::new(mixed + p.a * psi[i] * psi[j], 0.0)
    });
    Ok(QubitDensity4(r))
}

/// Concurrence of the pure state, `χ0 χ1 / 2`.
pub fn concurrence_pure(p: &QuasiWernerParams) -> Result<f64> {
    let s = schmidt_amplitudes(p)?;
    Ok((s.chi0 * s.chi1 / 2.0).clamp(0.0, 1.0))
}

/// `max[0, a χ0 χ1/2 - (1-a)/2]`.
pub fn concurrence_werner(p: &QuasiWernerParams) -> Result<f64> {
    let c = concurrence_pure(p)?;
    Ok((p.a * c - (1.0 - p.a) / 2.0).max(0.0))
}

/// Mixing parameter above which the state is entangled.
pub fn entanglement_threshold(p: &QuasiWernerParams) -> Result<f64> {
    let s = schmidt_amplitudes(p)?;
    Ok(1.0 / (1.0 + s.chi0 * s.chi1))
}

/// Entanglement of formation in bits.
pub fn eof(concurrence: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&concurrence) {
        return Err(Error::Domain(format!("concurrence {concurrence} outside [0, 1]")));
    }
    binary_entropy((1.0 + (1.0 - concurrence * concurrence).sqrt()) / 2.0)
}

fn entropy_bits(vals: &[f64]) -> f64 {
    vals.iter().map(|&x| xlog2x_neg(x)).sum()
}

/// Eigenvalues of the reduced state of either mode (they coincide).
fn marginal_eigenvalues(p: &QuasiWernerParams) -> Result<[f64; 2]> {
    let s = schmidt_amplitudes(p)?;
    let mix = (1.0 - p.a) / 2.0;
    Ok([mix + p.a * s.chi0 * s.chi0 / 4.0, mix + p.a * s.chi1 * s.chi1 / 4.0])
}

/// `(S_joint, S_marginal)` in bits.
pub fn werner_entropies(p: &QuasiWernerParams) -> Result<(f64, f64)> {
    let q = (1.0 - p.a) / 4.0;
    let joint = 3.0 * xlog2x_neg(q) + xlog2x_neg((1.0 + 3.0 * p.a) / 4.0);
    Ok((joint, entropy_bits(&marginal_eigenvalues(p)?)))
}

/// Outcome probability `p_k(θ)` of the measurement on Y.
fn outcome_probability(p: &QuasiWernerParams, chi0: f64, chi1: f64, k: usize, theta: f64) -> f64 {
    // Y's even basis state carries chi0 for `+` and chi1 for `-`.
    let (even, odd) = match p.sign {
        Sign::Plus => (chi0, chi1),
        Sign::Minus => (chi1, chi0),
    };
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    let weighted = if k == 0 {
        even * even * c2 + odd * odd * s2
    } else {
        even * even * s2 + odd * odd * c2
    };
    (1.0 - p.a) / 2.0 + p.a * weighted / 4.0
}

/// Post-measurement state of X and its probability for outcome `k`.
pub fn conditional_state(
    p: &QuasiWernerParams,
    k: usize,
    angles: MeasurementAngles,
) -> Result<(f64, Matrix2<Complex64>)> {
    if k > 1 {
        return Err(Error::InvalidParameter(format!("outcome {k} is not 0 or 1")));
    }
    let rho = density_matrix(p)?;
    let (c, s) = (angles.theta.cos(), angles.theta.sin());
    let e = Complex64::from_polar(1.0, angles.phi);
    let pk = if k == 0 {
        [Complex64::new(c, 0.0), e * s]
    } else {
        [e.conj() * s, Complex64::new(-c, 0.0)]
    };
    let r = &rho.0;
    let m = Matrix2::from_fn(|x, xp| {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..2 {
            for tp in 0..2 {
                acc += pk[t].conj() * r[(2 * x + t, 2 * xp + tp)] * pk[tp];
            }
        }
        acc
    });
    let prob = (m[(0, 0)] + m[(1, 1)]).re;
    if prob <= 0.0 {
        return Ok((0.0, m));
    }
    Ok((prob, m / Complex64::new(prob, 0.0)))
}

/// `S_Y - S_XY + Σ_k p_k H((1-a)/(4 p_k))` at measurement angle `θ`.
pub fn discord_closed_form(p: &QuasiWernerParams, theta: f64) -> Result<f64> {
    let s = schmidt_amplitudes(p)?;
    let (joint, marginal) = werner_entropies(p)?;
    let mut cond = 0.0;
    for k in 0..2 {
        let pk = outcome_probability(p, s.chi0, s.chi1, k, theta);
        if pk > 0.0 {
            cond += pk * binary_entropy(((1.0 - p.a) / (4.0 * pk)).min(1.0))?;
        }
    }
    Ok(marginal - joint + cond)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscordOptimizer {
    pub grid_points: usize,
    pub theta_tol: f64,
}

impl Default for DiscordOptimizer {
    fn default() -> Self {
        DiscordOptimizer { grid_points: 181, theta_tol: 1e-10 }
    }
}

/// Full correlation report; discord minimized over `θ ∈ [0, π/2]`.
pub fn discord(p: &QuasiWernerParams, opt: &DiscordOptimizer) -> Result<CorrelationReport> {
    if opt.grid_points < 3 {
        return Err(Error::InvalidParameter("discord grid needs at least 3 points".into()));
    }
    let half_pi = PI / 2.0;
    let mut evals = 0u64;
    let mut f = |t: f64| {
        evals += 1;
        discord_closed_form(p, t)
    };
    let n = opt.grid_points;
    let mut best = (f64::INFINITY, 0.0, 0usize);
    for i in 0..n {
        let t = half_pi * i as f64 / (n - 1) as f64;
        let v = f(t)?;
        // strict comparison keeps the smallest θ on ties
        if v < best.0 - 1e-12 {
            best = (v, t, i);
        }
    }
    let step = half_pi / (n - 1) as f64;
    let (mut lo, mut hi) = ((best.1 - step).max(0.0), (best.1 + step).min(half_pi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut iters = 0;
    while hi - lo > opt.theta_tol {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(x1)? <= f(x2)? {
            hi = x2;
        } else {
            lo = x1;
        }
        iters += 1;
        if iters > 200 {
            return Err(Error::Convergence {
                context: "discord golden-section search".into(),
                levels: iters,
                last_change: hi - lo,
                error_estimate: hi - lo,
            });
        }
    }
    let t_mid = 0.5 * (lo + hi);
    let v_mid = f(t_mid)?;
    let (mut qd, theta) = if v_mid < best.0 - 1e-12 { (v_mid, t_mid) } else { (best.0, best.1) };
    if qd < 0.0 {
        if qd > -1e-9 {
            qd = 0.0;
        } else {
            return Err(Error::Convergence {
                context: format!("discord evaluated to {qd:.3e}"),
                levels: 0,
                last_change: qd,
                error_estimate: qd,
            });
        }
    }
    let concurrence = concurrence_werner(p)?;
    let (joint, marginal) = werner_entropies(p)?;
    Ok(CorrelationReport {
        concurrence,
        eof: eof(concurrence)?,
        discord: qd,
        mutual_information: (2.0 * marginal - joint).max(0.0),
        optimal_angles: MeasurementAngles { theta, phi: 0.0 },
        optimizer_evals: evals,
    })
}
