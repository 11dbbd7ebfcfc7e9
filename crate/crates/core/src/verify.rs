//! Oracle-versus-closed-form certification checks, shared by the CLI
//! `verify` command and the acceptance tests.
//!
//! Every check draws its parameters from a seeded ChaCha stream, so a given
//! configuration always produces the same report.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correlations::{concurrence_werner, discord, DiscordOptimizer};
use crate::error::Result;
use crate::fock_oracle::{
    build_pacs, build_pacs_auto, cutoff_for_radius, discord_bruteforce, displacement_matrix,
    fidelity_quadrature_oracle, project_to_qubits, quasi_werner_density_with, wootters_concurrence, Cutoff,
};
use crate::phasespace::{wigner_quasi_werner, MixedPartConvention, PhasePoint2};
use crate::specfun::{factorial, laguerre_real, Sign};
use crate::states::QuasiWernerParams;
use crate::teleport::{chi_channel, displaced_matrix_element, fidelity, ChannelModel, FidelityOptions, InputState};

pub const DEFAULT_SEED: u64 = 0x5157_4552_4e45_5221;

pub const WIGNER_TOL: f64 = 1e-8;
pub const ELEMENT_TOL: f64 = 1e-10;
pub const CHANNEL_TOL: f64 = 1e-8;
pub const CONCURRENCE_TOL: f64 = 1e-10;
pub const DISCORD_TOL: f64 = 1e-6;
pub const FIDELITY_TOL: f64 = 1e-6;
pub const STABILITY_TOL: f64 = 1e-9;

const MIXINGS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const WIGNER_RADIUS: f64 = 2.0;
const CHANNEL_RADIUS: f64 = 2.5;
const ELEMENT_RADIUS: f64 = 4.0;
/// Relative accuracy at `|z| = 4` needs far more Fock levels than the tail
/// certificate alone provides.
const ELEMENT_CUTOFF: usize = 64;
/// Floor on the oracle cutoff; the bare tail certificate leaves errors of a
/// few 1e-10 in two-mode traces.
const ORACLE_MIN_CUTOFF: usize = 40;
const ORACLE_FIDELITY_HALF_WIDTH: f64 = 4.5;
const ORACLE_FIDELITY_PANELS: usize = 5;
const ORACLE_FIDELITY_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Sample count of the pointwise checks.
    pub points: usize,
    /// Sample count of the end-to-end fidelity check.
    pub fidelity_points: usize,
    /// Forces the oracle cutoff instead of the certified default rule.
    pub cutoff: Option<usize>,
    pub channel: ChannelModel,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: DEFAULT_SEED, points: 100, fidelity_points: 100, cutoff: None, channel: ChannelModel::default() }
    }
}

impl VerifyConfig {
    fn policy(&self, min: usize) -> Cutoff {
        match self.cutoff {
            Some(n) => Cutoff::Fixed(n),
            None => Cutoff::Auto { min: min.max(ORACLE_MIN_CUTOFF) },
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub channel: ChannelModel,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

struct Tally {
    name: String,
    tolerance: f64,
    worst: f64,
    samples: usize,
}

impl Tally {
    fn new(name: &str, tolerance: f64) -> Self {
        Tally { name: name.to_string(), tolerance, worst: 0.0, samples: 0 }
    }

    fn record(&mut self, dev: f64) {
        self.samples += 1;
        if !(dev <= self.worst) {
            self.worst = dev;
        }
    }

    fn finish(self, outcome: Result<()>) -> CheckResult {
        let error = outcome.err().map(|e| e.to_string());
        CheckResult {
            passed: error.is_none() && self.worst <= self.tolerance,
            name: self.name,
            max_deviation: self.worst,
            tolerance: self.tolerance,
            samples: self.samples,
            error,
        }
    }
}

fn random_amplitude<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.1..=1.5), rng.gen_range(0.0..2.0 * PI))
}

fn random_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius))
}

/// Random state on the certification grid: `|α|, |β| ∈ [0.1, 1.5]`,
/// `m ≤ 3`, `a` from the five mixing values, either sign.
pub fn random_params<R: Rng>(rng: &mut R) -> QuasiWernerParams {
    let alpha = random_amplitude(rng);
    let beta = random_amplitude(rng);
    let m = rng.gen_range(0..=3u32);
    let a = MIXINGS[rng.gen_range(0..MIXINGS.len())];
    let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
    QuasiWernerParams::new(alpha, beta, m, a, sign).expect("sampled parameters are valid")
}

pub fn check_wigner(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tally::new("wigner_vs_oracle", WIGNER_TOL);
    let mut rng = cfg.rng(1);
    let outcome = (|| {
        for _ in 0..cfg.points {
            let p = random_params(&mut rng);
            let (z1, z2) = (random_point(&mut rng, WIGNER_RADIUS), random_point(&mut rng, WIGNER_RADIUS));
            let (rho, _) = quasi_werner_density_with(&p, cfg.policy(cutoff_for_radius(2.0 * WIGNER_RADIUS * 2f64.sqrt())))?;
            let exact = rho.wigner(z1, z2)?;
            let closed = wigner_quasi_werner(&p, PhasePoint2 { z1, z2 }, MixedPartConvention::SubspaceIdentity)?;
            t.record((exact - closed).abs());
        }
        Ok(())
    })();
    t.finish(outcome)
}

pub fn check_displaced_element(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tally::new("displaced_element_vs_oracle", ELEMENT_TOL);
    let mut rng = cfg.rng(2);
    let outcome = (|| {
        for _ in 0..cfg.points {
            let alpha = random_amplitude(&mut rng);
            let m = rng.gen_range(0..=3u32);
            let z = Complex64::from_polar(rng.gen_range(0.0..=ELEMENT_RADIUS), rng.gen_range(0.0..2.0 * PI));
            let v = match cfg.cutoff {
                Some(n) => build_pacs(alpha, m, n)?,
                None => build_pacs_auto(alpha, m, ELEMENT_CUTOFF)?,
            };
            let d = displacement_matrix(z, v.cutoff)?;
            let oracle = v.coeffs.dotc(&(d * &v.coeffs)) * (factorial(m) * laguerre_real(m, -alpha.norm_sqr()));
            let closed = displaced_matrix_element(alpha, m, z)?;
            t.record((oracle - closed).norm() / oracle.norm().max(1e-300));
        }
        Ok(())
    })();
    t.finish(outcome)
}

pub fn check_channel(cfg: &VerifyConfig, model: ChannelModel) -> CheckResult {
    let name = match model {
        ChannelModel::ClosedForm => "channel_char_fn_vs_oracle[closed-form]",
        ChannelModel::Exact => "channel_char_fn_vs_oracle[exact]",
    };
    let mut t = Tally::new(name, CHANNEL_TOL);
    let mut rng = cfg.rng(3);
    let outcome = (|| {
        for _ in 0..cfg.points {
            let p = random_params(&mut rng);
            let (z1, z2) = (random_point(&mut rng, CHANNEL_RADIUS), random_point(&mut rng, CHANNEL_RADIUS));
            let (rho, _) = quasi_werner_density_with(&p, cfg.policy(cutoff_for_radius(CHANNEL_RADIUS * 2f64.sqrt())))?;
            let exact = rho.char_fn(z1, z2)?;
            let closed = chi_channel(&p, z1, z2, MixedPartConvention::SubspaceIdentity, model)?;
            t.record((exact - closed).norm());
        }
        Ok(())
    })();
    t.finish(outcome)
}

pub fn check_concurrence(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tally::new("concurrence_vs_wootters", CONCURRENCE_TOL);
    let mut rng = cfg.rng(4);
    let outcome = (|| {
        for _ in 0..cfg.points {
            let p = random_params(&mut rng);
            let (rho, basis) = quasi_werner_density_with(&p, cfg.policy(0))?;
            let oracle = wootters_concurrence(&project_to_qubits(&rho, &basis)?)?;
            t.record((oracle - concurrence_werner(&p)?).abs());
        }
        Ok(())
    })();
    t.finish(outcome)
}

pub fn check_discord(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tally::new("discord_vs_bruteforce", DISCORD_TOL);
    let mut rng = cfg.rng(5);
    let opt = DiscordOptimizer::default();
    let outcome = (|| {
        for _ in 0..cfg.points {
            let p = random_params(&mut rng);
            let (rho, basis) = quasi_werner_density_with(&p, cfg.policy(0))?;
            let oracle = discord_bruteforce(&project_to_qubits(&rho, &basis)?, 91, 8)?;
            t.record((oracle - discord(&p, &opt)?.discord).abs());
        }
        Ok(())
    })();
    t.finish(outcome)
}

pub fn check_fidelity(cfg: &VerifyConfig, model: ChannelModel) -> CheckResult {
    let name = match model {
        ChannelModel::ClosedForm => "fidelity_end_to_end[closed-form]",
        ChannelModel::Exact => "fidelity_end_to_end[exact]",
    };
    let mut t = Tally::new(name, FIDELITY_TOL);
    let mut rng = cfg.rng(6);
    let opts = FidelityOptions { model, ..FidelityOptions::default() };
    let cases: Vec<_> = (0..cfg.fidelity_points)
        .map(|_| (random_params(&mut rng), InputState::Coherent { gamma: random_point(&mut rng, 1.0) }))
        .collect();
    let policy = match cfg.cutoff {
        Some(n) => Cutoff::Fixed(n),
        None => Cutoff::Auto { min: cutoff_for_radius(ORACLE_FIDELITY_HALF_WIDTH * 2f64.sqrt()) },
    };
    let deviations = par_map(&cases, |(p, input)| -> Result<f64> {
        let p = p.with_a(1.0)?;
        let (rho, _) = quasi_werner_density_with(&p, policy)?;
        let oracle = fidelity_quadrature_oracle(
            input,
            &rho,
            ORACLE_FIDELITY_HALF_WIDTH,
            ORACLE_FIDELITY_PANELS,
            ORACLE_FIDELITY_ORDER,
        )?;
        Ok((oracle - fidelity(input, &p, &opts)?.value).abs())
    });
    let outcome = deviations.into_iter().try_for_each(|d| d.map(|d| t.record(d)));
    t.finish(outcome)
}

/// Order-preserving map over scoped worker threads.
fn par_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(items: &[T], f: F) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| scope.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("verification worker panicked")).collect()
    })
}

/// Doubling the oracle cutoff must leave its characteristic function and
/// Wigner values unchanged.
pub fn check_cutoff_stability(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tally::new("oracle_cutoff_stability", STABILITY_TOL);
    let mut rng = cfg.rng(7);
    let outcome = (|| {
        for _ in 0..cfg.points.min(20) {
            let p = random_params(&mut rng);
            let z1 = random_point(&mut rng, WIGNER_RADIUS / 2.0);
            let z2 = random_point(&mut rng, WIGNER_RADIUS / 2.0);
            let (lo, _) = quasi_werner_density_with(&p, cfg.policy(cutoff_for_radius(WIGNER_RADIUS * 2f64.sqrt())))?;
            let (hi, _) = quasi_werner_density_with(&p, Cutoff::Fixed(2 * lo.cutoff))?;
            t.record((lo.char_fn(z1, z2)? - hi.char_fn(z1, z2)?).norm());
            t.record((lo.wigner(z1, z2)? - hi.wigner(z1, z2)?).abs());
        }
        Ok(())
    })();
    t.finish(outcome)
}

/// Runs every check. The channel and end-to-end fidelity checks use the
/// configured channel model; the exact model is always checked as well.
pub fn run(cfg: &VerifyConfig) -> VerifyReport {
    let mut checks = vec![
        check_wigner(cfg),
        check_displaced_element(cfg),
        check_channel(cfg, cfg.channel),
        check_concurrence(cfg),
        check_discord(cfg),
        check_fidelity(cfg, cfg.channel),
        check_cutoff_stability(cfg),
    ];
    if cfg.channel != ChannelModel::Exact {
        checks.push(check_channel(cfg, ChannelModel::Exact));
        checks.push(check_fidelity(cfg, ChannelModel::Exact));
    }
    let all_passed = checks.iter().all(|c| c.passed);
    VerifyReport { seed: cfg.seed, channel: cfg.channel, checks, all_passed }
}
