//! Rational detection for floating-point ratios.
//!
//! A float `x` is treated as the rational `p/q` when some continued-fraction
//! convergent with `q <= DENOMINATOR_CAP` reproduces `x` to within a few ulps.
//! Everything else is treated as irrational; if the expansion ran into the cap
//! the caller gets a flag so it can warn.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Largest denominator tried by [`detect_rational`].
pub const DENOMINATOR_CAP: i64 = 1_000_000;

const ULP_SLACK: f64 = 8.0 * f64::EPSILON;

/// Exact rational in lowest terms with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Ratio {
    num: i64,
    den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Some(Self { num: sign * num / g.max(1), den: sign * den / g.max(1) })
    }

    pub fn integer(n: i64) -> Self {
        Self { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `floor(k * self)` and whether `k * self` is an integer, in exact arithmetic.
    pub fn scaled_floor(&self, k: i64) -> (i64, bool) {
        let n = self.num as i128 * k as i128;
        let d = self.den as i128;
        (n.div_euclid(d) as i64, n.rem_euclid(d) == 0)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Ratio {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let num: i64 = a.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let den: i64 = b.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        Ratio::new(num, den).ok_or_else(|| format!("zero denominator in {s:?}"))
    }
}

impl TryFrom<String> for Ratio {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Ratio> for String {
    fn from(r: Ratio) -> String {
        r.to_string()
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Outcome of [`detect_rational`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detection {
    Rational(Ratio),
    /// No convergent matched. `hit_cap` is set when the expansion was cut off
    /// by the denominator cap rather than by exhausting float precision.
    Irrational { hit_cap: bool },
}

impl Detection {
    pub fn is_rational(&self) -> bool {
        matches!(self, Detection::Rational(_))
    }
}

/// Continued-fraction rational detection with denominator cap [`DENOMINATOR_CAP`].
pub fn detect_rational(x: f64) -> Detection {
    if !x.is_finite() {
        return Detection::Irrational { hit_cap: false };
    }
    let tol = ULP_SLACK * x.abs().max(1.0);
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > DENOMINATOR_CAP as i128 {
            return Detection::Irrational { hit_cap: true };
        }
        if (x - p2 as f64 / q2 as f64).abs() <= tol {
            return Detection::Rational(Ratio::new(p2 as i64, q2 as i64).expect("positive denominator"));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rest - a;
        if frac <= 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    Detection::Irrational { hit_cap: false }
}
