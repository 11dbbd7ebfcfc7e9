//! Special functions used by every closed form in the crate.
//!
//! Laguerre polynomials are evaluated by their three-term recurrences, which
//! stay accurate for complex arguments where the monomial expansion loses
//! digits to cancellation. The confluent hypergeometric function is only
//! needed with integer parameters.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Largest exponent accepted before an operation reports a rescale error.
pub const MAX_EXPONENT: f64 = 700.0;

/// Selects the even (`Plus`) or odd (`Minus`) superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" | "even" => Ok(Sign::Plus),
            "-" | "minus" | "odd" => Ok(Sign::Minus),
            other => Err(Error::InvalidParameter(format!("unknown sign `{other}`"))),
        }
    }
}

/// Laguerre polynomial `L_m(x)` for complex `x`.
pub fn laguerre(m: u32, x: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if m == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = one - x;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Real-argument convenience wrapper around [`laguerre`].
pub fn laguerre_real(m: u32, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Associated Laguerre polynomial `L_n^{(k)}(x)`.
pub fn assoc_laguerre(n: u32, k: u32, x: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if n == 0 {
        return one;
    }
    let kf = k as f64;
    let mut prev = one;
    let mut cur = one * (1.0 + kf) - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - x) * cur - (jf + kf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Kummer's confluent hypergeometric function `1F1(a; b; x)` for integer
/// parameters.
///
/// For `a <= 0` the series terminates and is summed exactly. Otherwise the
/// series is summed until the relative size of the tail drops below 1e-14;
/// arguments with negative real part are first mapped through the Kummer
/// transformation `1F1(a; b; x) = e^x 1F1(b - a; b; -x)` so that the sum
/// runs without cancellation.
pub fn kummer_1f1(a: i64, b: i64, x: Complex64) -> Result<Complex64> {
    if b < 1 {
        return Err(Error::Domain(format!("1F1 requires b >= 1, got b = {b}")));
    }
    if !(x.re.is_finite() && x.im.is_finite()) {
        return Err(Error::Domain("1F1 argument is not finite".into()));
    }
    if a <= 0 {
        return Ok(terminating_1f1(a, b, x));
    }
    if x.norm() > MAX_EXPONENT {
        return Err(Error::Rescale(format!(
            "non-terminating 1F1 with |x| = {:.3e} > {MAX_EXPONENT}",
            x.norm()
        )));
    }
    if x.re < 0.0 {
        let inner = if b - a <= 0 {
            terminating_1f1(b - a, b, -x)
        } else {
            series_1f1(b - a, b, -x)
        };
        return Ok(x.exp() * inner);
    }
    Ok(series_1f1(a, b, x))
}

fn terminating_1f1(a: i64, b: i64, x: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let n = (-a) as u64;
    for k in 0..n {
        let kf = k as f64;
        term *= x * ((a as f64 + kf) / ((b as f64 + kf) * (kf + 1.0)));
        sum += term;
    }
    sum
}

fn series_1f1(a: i64, b: i64, x: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut k = 0u64;
    loop {
        let kf = k as f64;
        term *= x * ((a as f64 + kf) / ((b as f64 + kf) * (kf + 1.0)));
        sum += term;
        k += 1;
        // Terms shrink monotonically once k exceeds |x|.
        if kf > x.norm() && term.norm() <= 1e-16 * sum.norm() {
            break;
        }
        if k > 10_000 {
            break;
        }
    }
    sum
}

/// Binary Shannon entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !x.is_finite() || x < -SLACK || x > 1.0 + SLACK {
        return Err(Error::Domain(format!("binary entropy argument {x} outside [0, 1]")));
    }
    let x = x.clamp(0.0, 1.0);
    Ok(xlog2x_neg(x) + xlog2x_neg(1.0 - x))
}

/// `-x log2 x` with the continuous extension at zero.
pub(crate) fn xlog2x_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// `e^{x+y} L_m(-x) L_m(-y) ± e^{-x-y} L_m(x) L_m(y)`.
pub fn lm_pm(sign: Sign, m: u32, x: Complex64, y: Complex64) -> Result<Complex64> {
    let s = x + y;
    if s.re.abs() > MAX_EXPONENT {
        return Err(Error::Rescale(format!(
            "exponent Re(x + y) = {:.3e} out of range",
            s.re
        )));
    }
    let grow = s.exp() * laguerre(m, -x) * laguerre(m, -y);
    let decay = (-s).exp() * laguerre(m, x) * laguerre(m, y);
    Ok(grow + sign.factor() * decay)
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
