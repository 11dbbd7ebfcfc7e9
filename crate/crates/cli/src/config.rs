use std::path::{Path, PathBuf};

use qwerner::phasespace::{GridAxis, GridSpec, LogBase, MixedPartConvention};
use qwerner::teleport::{ChannelModel, InputState};
use qwerner::verify::VerifyConfig;
use qwerner::{Complex64, QuasiWernerParams, Sign};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

/// A list-valued key: a scalar, an explicit list, or an inclusive range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Values {
    One(f64),
    List(Vec<f64>),
    Range(Range),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Values {
    fn expand(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let v = match self {
            Values::One(x) => vec![*x],
            Values::List(xs) => xs.clone(),
            Values::Range(r) => {
                let ax = GridAxis::range(r.start, r.stop, r.points);
                ax.validate(key).map_err(|e| CliError::Config(e.to_string()))?;
                ax.values()
            }
        };
        if v.is_empty() {
            return Err(CliError::Config(format!("`{key}` is empty")));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("`{key}` contains non-finite value {x}")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Beta {
    Tied(String),
    Values(Values),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Ints {
    One(u32),
    List(Vec<u32>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Signs {
    One(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub alpha: Option<Values>,
    /// Either values or the string `"alpha"`, which ties β to α per point.
    pub beta: Option<Beta>,
    pub m: Option<Ints>,
    pub a: Option<Values>,
    pub sign: Option<Signs>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub convention: Option<String>,
    pub tol: Option<f64>,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Fixed(f64),
    Range(Range),
}

impl Axis {
    fn to_grid(self) -> GridAxis {
        match self {
            Axis::Fixed(v) => GridAxis::fixed(v),
            Axis::Range(r) => GridAxis::range(r.start, r.stop, r.points),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub q1: Option<Axis>,
    pub p1: Option<Axis>,
    pub q2: Option<Axis>,
    pub p2: Option<Axis>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WlnSection {
    /// `"e"` or `"2"`.
    pub log_base: Option<String>,
    pub two_mode_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationsSection {
    pub p2: Option<f64>,
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum InputSection {
    Coherent {
        #[serde(default)]
        gamma_re: f64,
        #[serde(default)]
        gamma_im: f64,
    },
    Squeezed {
        s: f64,
        #[serde(default)]
        phi: f64,
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelitySection {
    pub channel: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub run: Option<RunSection>,
    pub state: Option<StateSection>,
    pub grid: Option<GridSection>,
    pub wln: Option<WlnSection>,
    pub correlations: Option<CorrelationsSection>,
    pub input: Option<InputSection>,
    pub fidelity: Option<FidelitySection>,
    pub verify: Option<VerifyConfig>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Rejects sections the subcommand would silently ignore.
    pub fn only(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        let present = [
            ("state", self.state.is_some()),
            ("grid", self.grid.is_some()),
            ("wln", self.wln.is_some()),
            ("correlations", self.correlations.is_some()),
            ("input", self.input.is_some()),
            ("fidelity", self.fidelity.is_some()),
            ("verify", self.verify.is_some()),
        ];
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                return Err(CliError::Config(format!("section [{name}] is not used by `{command}`")));
            }
        }
        Ok(())
    }
}

/// Flag values; each one overrides the matching `[run]` key.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub convention: Option<String>,
    pub tol: Option<f64>,
    pub jobs: Option<usize>,
    pub channel: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Run {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub convention: MixedPartConvention,
    pub tol: Option<f64>,
    pub jobs: Option<usize>,
}

impl Run {
    pub fn resolve(file: &FileConfig, flags: &Overrides) -> Result<Self, CliError> {
        let run = file.run.clone().unwrap_or_default();
        let format = match (flags.format, run.format) {
            (Some(f), _) => Some(f),
            (None, Some(s)) => Some(s.parse().map_err(CliError::Config)?),
            (None, None) => None,
        };
        let convention = match flags.convention.clone().or(run.convention) {
            Some(s) => s.parse().map_err(|e: qwerner::Error| CliError::Config(e.to_string()))?,
            None => MixedPartConvention::SubspaceIdentity,
        };
        let tol = flags.tol.or(run.tol);
        if let Some(t) = tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!("tolerance must be positive, got {t}")));
            }
        }
        let jobs = flags.jobs.or(run.jobs);
        if jobs == Some(0) {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        let out = flags.out.clone().or(run.out);
        if let Some(path) = &out {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            if !dir.is_dir() {
                return Err(CliError::Config(format!("output directory {} does not exist", dir.display())));
            }
        }
        Ok(Run { out, format, convention, tol, jobs })
    }
}

/// Fallback values for a subcommand's `[state]` section.
pub struct StateDefaults {
    pub alpha: &'static [f64],
    pub beta: Option<&'static [f64]>,
    pub m: &'static [u32],
    pub a: Values,
    pub sign: &'static [Sign],
}

#[derive(Debug, Clone, Copy)]
pub enum BetaRule {
    Given(f64),
    TiedToAlpha,
    /// `π/(4 p₂)` for `+` and `π/(2 p₂)` for `-`.
    MinimaLocus(f64),
}

impl BetaRule {
    fn value(self, alpha: f64, sign: Sign) -> f64 {
        match self {
            BetaRule::Given(b) => b,
            BetaRule::TiedToAlpha => alpha,
            BetaRule::MinimaLocus(p2) => match sign {
                Sign::Plus => std::f64::consts::PI / (4.0 * p2),
                Sign::Minus => std::f64::consts::PI / (2.0 * p2),
            },
        }
    }
}

/// Expanded parameter sweep; `a` varies fastest, then `β`, `α`, `m`, sign.
pub fn expand_state(
    section: Option<&StateSection>,
    defaults: StateDefaults,
    beta_fallback: Option<BetaRule>,
) -> Result<Sweep, CliError> {
    let s = section.cloned().unwrap_or_default();
    let alphas = match &s.alpha {
        Some(v) => v.expand("alpha")?,
        None => defaults.alpha.to_vec(),
    };
    let betas: Vec<BetaRule> = match &s.beta {
        Some(Beta::Tied(t)) if t == "alpha" => vec![BetaRule::TiedToAlpha],
        Some(Beta::Tied(t)) => return Err(CliError::Config(format!("beta = \"{t}\": only \"alpha\" is accepted as a string"))),
        Some(Beta::Values(v)) => v.expand("beta")?.into_iter().map(BetaRule::Given).collect(),
        None => match (defaults.beta, beta_fallback) {
            (_, Some(rule)) => vec![rule],
            (Some(b), None) => b.iter().copied().map(BetaRule::Given).collect(),
            (None, None) => vec![BetaRule::TiedToAlpha],
        },
    };
    let ms = match &s.m {
        Some(Ints::One(m)) => vec![*m],
        Some(Ints::List(ms)) => ms.clone(),
        None => defaults.m.to_vec(),
    };
    if ms.is_empty() {
        return Err(CliError::Config("`m` is empty".into()));
    }
    let a_values = match &s.a {
        Some(v) => v.expand("a")?,
        None => defaults.a.expand("a")?,
    };
    let signs: Vec<Sign> = match &s.sign {
        Some(Signs::One(x)) => vec![parse_sign(x)?],
        Some(Signs::List(xs)) => xs.iter().map(|x| parse_sign(x)).collect::<Result<_, _>>()?,
        None => defaults.sign.to_vec(),
    };
    if signs.is_empty() {
        return Err(CliError::Config("`sign` is empty".into()));
    }
    let mut out = Vec::with_capacity(signs.len() * ms.len() * alphas.len() * betas.len() * a_values.len());
    for &sign in &signs {
        for &m in &ms {
            for &alpha in &alphas {
                for &rule in &betas {
                    let beta = rule.value(alpha, sign);
                    for &a in &a_values {
                        let p = QuasiWernerParams::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0), m, a, sign)
                            .map_err(|e| CliError::Config(e.to_string()))?;
                        out.push(p);
                    }
                }
            }
        }
    }
    Ok(Sweep { points: out, a_values })
}

pub struct Sweep {
    pub points: Vec<QuasiWernerParams>,
    pub a_values: Vec<f64>,
}

fn parse_sign(s: &str) -> Result<Sign, CliError> {
    s.parse().map_err(|e: qwerner::Error| CliError::Config(e.to_string()))
}

pub fn grid_spec(section: Option<&GridSection>) -> Result<GridSpec, CliError> {
    let g = section.cloned().unwrap_or_default();
    let wide = Axis::Range(Range { start: -3.0, stop: 3.0, points: 61 });
    let spec = GridSpec {
        q1: g.q1.unwrap_or(Axis::Fixed(0.0)).to_grid(),
        p1: g.p1.unwrap_or(Axis::Fixed(0.0)).to_grid(),
        q2: g.q2.unwrap_or(wide).to_grid(),
        p2: g.p2.unwrap_or(wide).to_grid(),
    };
    for (name, ax) in [("q1", spec.q1), ("p1", spec.p1), ("q2", spec.q2), ("p2", spec.p2)] {
        ax.validate(name).map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(spec)
}

pub fn log_base(section: Option<&WlnSection>) -> Result<LogBase, CliError> {
    match section.and_then(|s| s.log_base.as_deref()) {
        None | Some("e") | Some("natural") => Ok(LogBase::Natural),
        Some("2") => Ok(LogBase::Two),
        Some(other) => Err(CliError::Config(format!("log_base must be \"e\" or \"2\", got \"{other}\""))),
    }
}

pub fn input_state(section: Option<&InputSection>) -> Result<InputState, CliError> {
    let input = match section {
        None => InputState::Coherent { gamma: Complex64::new(0.0, 0.0) },
        Some(InputSection::Coherent { gamma_re, gamma_im }) => InputState::Coherent { gamma: Complex64::new(*gamma_re, *gamma_im) },
        Some(InputSection::Squeezed { s, phi }) => InputState::Squeezed { s: *s, phi: *phi },
    };
    input.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(input)
}

pub fn channel(file: Option<&str>, flag: Option<&str>) -> Result<Option<ChannelModel>, CliError> {
    flag.or(file)
        .map(|s| s.parse().map_err(|e: qwerner::Error| CliError::Config(e.to_string())))
        .transpose()
}
