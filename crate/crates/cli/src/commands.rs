use qwerner::correlations::{discord, DiscordOptimizer};
use qwerner::phasespace::{
    wigner_grid, wigner_quasi_werner, wln_reduced, wln_two_mode, PhasePoint2, TWO_MODE_DEFAULT_TOL,
};
use qwerner::quadrature::QuadratureConfig;
use qwerner::teleport::{fidelity_sweep, FidelityOptions, InputState};
use qwerner::verify::{self, VerifyConfig};
use qwerner::{QuasiWernerParams, Sign};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{self, BetaRule, FileConfig, Format, Overrides, Run, StateDefaults, Values};
use crate::output::{emit, sidecar_path, to_json, Cell, Table};
use crate::CliError;

const DEFAULT_P2: f64 = 0.5;

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))
}

/// Maps in parallel, keeps input order and reports the first error in that
/// order, so results do not depend on the worker count.
fn ordered<T: Sync, R: Send>(
    jobs: Option<usize>,
    items: &[T],
    f: impl Fn(&T) -> qwerner::Result<R> + Sync + Send,
) -> Result<Vec<R>, CliError> {
    let results: Vec<qwerner::Result<R>> = pool(jobs)?.install(|| items.par_iter().map(&f).collect());
    results.into_iter().collect::<qwerner::Result<Vec<R>>>().map_err(CliError::Numeric)
}

fn quadrature(tol: Option<f64>) -> QuadratureConfig {
    match tol {
        Some(t) => QuadratureConfig::default().with_tol(t),
        None => QuadratureConfig::default(),
    }
}

fn param_cells(p: &QuasiWernerParams) -> Vec<Cell> {
    vec![
        Cell::Num(p.alpha.re),
        Cell::Num(p.beta.re),
        Cell::Int(p.m as u64),
        Cell::Num(p.a),
        Cell::Text(p.sign.symbol().to_string()),
    ]
}

pub fn wigner(file: &FileConfig, flags: &Overrides) -> Result<(), CliError> {
    file.only("wigner", &["state", "grid"])?;
    let run = Run::resolve(file, flags)?;
    let sweep = config::expand_state(
        file.state.as_ref(),
        StateDefaults { alpha: &[0.2], beta: Some(&[0.1]), m: &[0], a: Values::One(0.4), sign: &[Sign::Plus] },
        None,
    )?;
    let [p] = sweep.points[..] else {
        return Err(CliError::Config(format!("wigner needs a single parameter point, got {}", sweep.points.len())));
    };
    let grid = config::grid_spec(file.grid.as_ref())?;
    let rows = wigner_grid(&p, &grid, run.convention).map_err(CliError::Numeric)?;
    let mut t = Table::new(&["q1", "p1", "q2", "p2", "W"]);
    for r in rows {
        t.push(vec![Cell::Num(r.q1), Cell::Num(r.p1), Cell::Num(r.q2), Cell::Num(r.p2), Cell::Num(r.w)]);
    }
    emit(run.out.as_deref(), &t.render(run.format.unwrap_or(Format::Csv)))
}

pub fn wln(file: &FileConfig, flags: &Overrides) -> Result<(), CliError> {
    file.only("wln", &["state", "wln"])?;
    let run = Run::resolve(file, flags)?;
    let sweep = config::expand_state(
        file.state.as_ref(),
        StateDefaults {
            alpha: &[0.2],
            beta: Some(&[0.1]),
            m: &[0, 1, 2, 3],
            a: Values::List((0..=10).map(|k| k as f64 / 10.0).collect()),
            sign: &[Sign::Plus],
        },
        None,
    )?;
    let base = config::log_base(file.wln.as_ref())?;
    let two_tol = match file.wln.as_ref().and_then(|w| w.two_mode_tol).or(run.tol) {
        Some(t) if !(t.is_finite() && t > 0.0) => return Err(CliError::Config(format!("two_mode_tol must be positive, got {t}"))),
        Some(t) => t,
        None => TWO_MODE_DEFAULT_TOL,
    };
    let single = quadrature(run.tol);
    let two = QuadratureConfig::default().with_tol(two_tol);
    let conv = run.convention;
    let results = ordered(run.jobs, &sweep.points, |p| {
        let w = wln_two_mode(p, conv, &two, base)?;
        let r1 = wln_reduced(p, 1, conv, &single, base)?;
        let r2 = wln_reduced(p, 2, conv, &single, base)?;
        Ok((w, r1, r2))
    })?;
    let mut t = Table::new(&["alpha", "beta", "m", "a", "sign", "wln", "wln_mode1", "wln_mode2", "wln_err_estimate"]);
    for (p, (w, r1, r2)) in sweep.points.iter().zip(results) {
        let mut row = param_cells(p);
        row.extend([Cell::Num(w.value), Cell::Num(r1.value), Cell::Num(r2.value), Cell::Num(w.error_estimate)]);
        t.push(row);
    }
    emit(run.out.as_deref(), &t.render(run.format.unwrap_or(Format::Csv)))
}

pub fn correlations(file: &FileConfig, flags: &Overrides) -> Result<(), CliError> {
    file.only("correlations", &["state", "correlations"])?;
    let run = Run::resolve(file, flags)?;
    let section = file.correlations.clone().unwrap_or_default();
    let p2 = section.p2.unwrap_or(DEFAULT_P2);
    if !(p2.is_finite() && p2 != 0.0) {
        return Err(CliError::Config(format!("p2 must be finite and non-zero, got {p2}")));
    }
    let mut opt = DiscordOptimizer::default();
    if let Some(n) = section.grid_points {
        opt.grid_points = n;
    }
    let sweep = config::expand_state(
        file.state.as_ref(),
        StateDefaults {
            alpha: &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0],
            beta: None,
            m: &[0, 1],
            a: Values::One(0.6),
            sign: &[Sign::Plus],
        },
        Some(BetaRule::MinimaLocus(p2)),
    )?;
    let conv = run.convention;
    let results = ordered(run.jobs, &sweep.points, |p| {
        let r = discord(p, &opt)?;
        let w = wigner_quasi_werner(p, PhasePoint2::new(0.0, 0.0, 0.0, p2), conv)?;
        Ok((r, w))
    })?;
    let mut t = Table::new(&[
        "alpha",
        "beta",
        "m",
        "a",
        "sign",
        "concurrence",
        "eof",
        "discord",
        "mutual_information",
        "theta_star",
        "wigner",
    ]);
    for (p, (r, w)) in sweep.points.iter().zip(results) {
        let mut row = param_cells(p);
        row.extend([
            Cell::Num(r.concurrence),
            Cell::Num(r.eof),
            Cell::Num(r.discord),
            Cell::Num(r.mutual_information),
            Cell::Num(r.optimal_angles.theta),
            Cell::Num(w),
        ]);
        t.push(row);
    }
    emit(run.out.as_deref(), &t.render(run.format.unwrap_or(Format::Csv)))
}

fn input_cells(input: &InputState) -> Vec<Cell> {
    let (g, s, phi) = match *input {
        InputState::Coherent { gamma } => (gamma, 0.0, 0.0),
        InputState::Squeezed { s, phi } => (Default::default(), s, phi),
    };
    vec![Cell::Text(input.kind().to_string()), Cell::Num(g.re), Cell::Num(g.im), Cell::Num(s), Cell::Num(phi)]
}

pub fn fidelity(file: &FileConfig, flags: &Overrides) -> Result<(), CliError> {
    file.only("fidelity", &["state", "input", "fidelity"])?;
    let run = Run::resolve(file, flags)?;
    let input = config::input_state(file.input.as_ref())?;
    let model = config::channel(file.fidelity.as_ref().and_then(|f| f.channel.as_deref()), flags.channel.as_deref())?;
    let opts = FidelityOptions {
        convention: run.convention,
        model: model.unwrap_or_default(),
        quadrature: quadrature(run.tol),
    };
    let sweep = config::expand_state(
        file.state.as_ref(),
        StateDefaults {
            alpha: &[0.67],
            beta: None,
            m: &[0, 1, 2, 3],
            a: Values::List((0..=100).map(|k| k as f64 / 100.0).collect()),
            sign: &[Sign::Plus, Sign::Minus],
        },
        None,
    )?;
    let curves: Vec<QuasiWernerParams> = sweep.points.iter().step_by(sweep.a_values.len()).copied().collect();
    let a_values = &sweep.a_values;
    let results = ordered(run.jobs, &curves, |p| fidelity_sweep(&input, p, a_values, &opts))?;

    let mut t = Table::new(&[
        "input_kind",
        "gamma_re",
        "gamma_im",
        "s",
        "phi",
        "alpha",
        "beta",
        "m",
        "a",
        "sign",
        "fidelity",
        "err_estimate",
    ]);
    let mut summary = Vec::with_capacity(results.len());
    for (p, curve) in curves.iter().zip(&results) {
        for pt in &curve.points {
            let mut row = input_cells(&input);
            row.extend(param_cells(&QuasiWernerParams { a: pt.a, ..*p }));
            row.extend([Cell::Num(pt.fidelity.value), Cell::Num(pt.fidelity.quadrature_error_estimate)]);
            t.push(row);
        }
        summary.push(json!({
            "params": {
                "input": input,
                "alpha": p.alpha.re,
                "beta": p.beta.re,
                "m": p.m,
                "sign": p.sign,
                "channel": opts.model,
            },
            "max_fidelity": curve.max_fidelity,
            "argmax_a": curve.argmax_a,
            "beats_classical_bound": curve.max_fidelity > 0.5,
        }));
    }
    let summary = to_json(&json!({ "curves": summary }));
    emit(run.out.as_deref(), &t.render(run.format.unwrap_or(Format::Csv)))?;
    match &run.out {
        Some(out) => crate::output::write_atomic(&sidecar_path(out), &summary),
        None => {
            eprint!("{summary}");
            Ok(())
        }
    }
}

/// Returns whether every check passed.
pub fn verify(file: &FileConfig, flags: &Overrides) -> Result<bool, CliError> {
    file.only("verify", &["verify"])?;
    let run = Run::resolve(file, flags)?;
    if run.tol.is_some() {
        return Err(CliError::Config("verify uses fixed tolerances; --tol does not apply".into()));
    }
    let mut cfg: VerifyConfig = file.verify.unwrap_or_default();
    if let Some(model) = config::channel(None, flags.channel.as_deref())? {
        cfg.channel = model;
    }
    if cfg.points == 0 || cfg.fidelity_points == 0 {
        return Err(CliError::Config("verify needs at least one sample per check".into()));
    }
    let report = pool(run.jobs)?.install(|| verify::run(&cfg));
    let text = match run.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut t = Table::new(&["name", "passed", "max_deviation", "tolerance", "samples", "error"]);
            for c in &report.checks {
                t.push(vec![
                    Cell::Text(c.name.clone()),
                    Cell::Text(c.passed.to_string()),
                    Cell::Num(c.max_deviation),
                    Cell::Num(c.tolerance),
                    Cell::Int(c.samples as u64),
                    Cell::Text(c.error.clone().unwrap_or_default().replace([',', '\n'], ";")),
                ]);
            }
            t.render(Format::Csv)
        }
    };
    emit(run.out.as_deref(), &text)?;
    Ok(report.all_passed)
}
