//! Radial Hamiltonians `H = h(r)` and their action functions.
//!
//! A profile is constant `c0 <= 0` on `(0, 1]`, strictly convex on `[1, r_max]`
//! with `h'(1) = 0` and `h'(r_max) = a`, and linear `a r - c` beyond `r_max`.
//! The convex piece comes from a closed-form family or a piecewise-linear `h''`.
//!
//! * `A_h(r) = r h'(r) - h(r)`, nondecreasing with `A_h' = r h''`.
//! * `𝔞_H(T) = A_h(r)` where `h'(r) = T`, for `0 <= T <= a`; `𝔞_H' = r`.

pub mod bounds;
pub mod continuation;
pub mod trace;

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bounds::{
    claim1_check, crossing_energy_floor, location_bound, Claim1Report, CrossingEnergyInputs, LocationBound,
    SalamonConstants,
};
pub use continuation::{
    compare_action_functions, homotopy_action, homotopy_action_derivative, transfer_map, DominanceCertificate,
    TransferPoint, TransferReport,
};
pub use trace::{cylinder_trace_check, CylinderTrace, TraceReport};

/// Grid density used by the "holds on grid" checks.
pub const DEFAULT_GRID: usize = 4096;

const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("h'' is negative or vanishes at r = {r} (h'' = {value:.3e})")]
    ConvexityViolation { r: f64, value: f64 },
    #[error("h'(r_max) = {found} does not match the slope {slope}")]
    SlopeMismatch { found: f64, slope: f64 },
    #[error("profile pieces do not join: {0}")]
    JoinDiscontinuity(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("period {period} outside [0, {slope}]")]
    PeriodOutOfRange { period: f64, slope: f64 },
    #[error("action {tau} outside [{lo}, {hi}]")]
    OutOfRange { tau: f64, lo: f64, hi: f64 },
    #[error("H1 >= H0 fails at r = {r} (gap {gap:.3e})")]
    NotDominated { r: f64, gap: f64 },
    #[error("h''' >= 0 is only certified up to {certified:?}, requested {requested}")]
    UncertifiedRegion { certified: Option<f64>, requested: f64 },
    #[error("energy {energy} exceeds the threshold {epsilon}")]
    EnergyAboveThreshold { energy: f64, epsilon: f64 },
    #[error("bad geometry: {0}")]
    BadGeometry(String),
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    /// `h = 0` on `(0, 1]`.
    #[default]
    Semi,
    /// `h = c0 < 0` on `(0, 1]`.
    Admissible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Quadratic,
    Cubic,
    Exponential,
    Spline,
}

/// Serialized profile description.
///
/// * `quadratic`: `h'' = a / L` with `L = r_max - 1`.
/// * `cubic`: `h'' = (1 - θ) a / L + 2 θ a (r - 1) / L²`, `θ ∈ (-1, 1]`.
/// * `exponential`: `h'' ∝ e^{γ (r - 1)}`, `γ ≠ 0`.
/// * `spline`: knots `(r, h'')` of a piecewise-linear `h''` from 1 to `r_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub family: Family,
    pub slope: f64,
    pub r_max: f64,
    #[serde(default)]
    pub admissibility: Admissibility,
    /// Value on `(0, 1]`; must be 0 for semi-admissible and negative otherwise.
    #[serde(default)]
    pub base: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<[f64; 2]>>,
}

impl ProfileSpec {
    pub fn quadratic(slope: f64, r_max: f64) -> Self {
        Self {
            family: Family::Quadratic,
            slope,
            r_max,
            admissibility: Admissibility::Semi,
            base: 0.0,
            theta: None,
            gamma: None,
            knots: None,
        }
    }

    pub fn cubic(slope: f64, r_max: f64, theta: f64) -> Self {
        Self { family: Family::Cubic, theta: Some(theta), ..Self::quadratic(slope, r_max) }
    }

    pub fn exponential(slope: f64, r_max: f64, gamma: f64) -> Self {
        Self { family: Family::Exponential, gamma: Some(gamma), ..Self::quadratic(slope, r_max) }
    }

    pub fn spline(slope: f64, r_max: f64, knots: Vec<[f64; 2]>) -> Self {
        Self { family: Family::Spline, knots: Some(knots), ..Self::quadratic(slope, r_max) }
    }

    pub fn admissible(mut self, base: f64) -> Self {
        self.admissibility = Admissibility::Admissible;
        self.base = base;
        self
    }

    pub fn build(&self) -> Result<HamiltonianProfile, HamiltonianError> {
        build_profile(self)
    }
}

/// Convex piece of the profile as a function of `x = r - 1 ∈ [0, L]`.
#[derive(Clone, Debug, PartialEq)]
enum Shape {
    /// `h'' = alpha + beta x`.
    Polynomial { alpha: f64, beta: f64 },
    /// `h'' = alpha e^{gamma x}`.
    Exponential { alpha: f64, gamma: f64 },
    /// Knots `x_i`, `h''_i`, and the values of `h'` and `h - c0` at the knots.
    Spline { xs: Vec<f64>, v: Vec<f64>, d1: Vec<f64>, d0: Vec<f64> },
}

impl Shape {
    /// `(h - c0, h', h'', h''')` at `x ∈ [0, L]`.
    fn eval(&self, x: f64) -> [f64; 4] {
        match self {
            Shape::Polynomial { alpha, beta } => [
                alpha * x * x / 2.0 + beta * x * x * x / 6.0,
                alpha * x + beta * x * x / 2.0,
                alpha + beta * x,
                *beta,
            ],
            Shape::Exponential { alpha, gamma } => {
                let e = (gamma * x).exp();
                let em1 = (gamma * x).exp_m1();
                [alpha / gamma * (em1 / gamma - x), alpha * em1 / gamma, alpha * e, alpha * gamma * e]
            }
            Shape::Spline { xs, v, d1, d0 } => {
                let last = xs.len() - 2;
                let i = match xs.partition_point(|k| *k <= x) {
                    0 => 0,
                    p => (p - 1).min(last),
                };
                let u = x - xs[i];
                let s = (v[i + 1] - v[i]) / (xs[i + 1] - xs[i]);
                [
                    d0[i] + d1[i] * u + v[i] * u * u / 2.0 + s * u * u * u / 6.0,
                    d1[i] + v[i] * u + s * u * u / 2.0,
                    v[i] + s * u,
                    s,
                ]
            }
        }
    }
}

/// A validated three-piece radial profile.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianProfile {
    spec: ProfileSpec,
    shape: Shape,
    /// Multiplier applied to every value (from [`HamiltonianProfile::scaled`]).
    scale: f64,
    /// `c = A_h(r_max)`.
    c: f64,
    h_triple_nonneg_up_to: Option<f64>,
}

/// Builds and certifies a profile on a dense grid.
pub fn build_profile(spec: &ProfileSpec) -> Result<HamiltonianProfile, HamiltonianError> {
    let a = spec.slope;
    let r_max = spec.r_max;
    if !(a.is_finite() && a > 0.0) {
        return Err(HamiltonianError::InvalidParameter(format!("slope {a} must be positive")));
    }
    if !(r_max.is_finite() && r_max > 1.0) {
        return Err(HamiltonianError::InvalidParameter(format!("r_max {r_max} must exceed 1")));
    }
    match spec.admissibility {
        Admissibility::Semi if spec.base != 0.0 => {
            return Err(HamiltonianError::InvalidParameter("semi-admissible profiles have base 0".into()))
        }
        Admissibility::Admissible if !(spec.base < 0.0 && spec.base.is_finite()) => {
            return Err(HamiltonianError::InvalidParameter("admissible profiles need a negative base".into()))
        }
        _ => {}
    }
    let l = r_max - 1.0;
    let param = |name: &str, v: Option<f64>| {
        v.filter(|x| x.is_finite())
            .ok_or_else(|| HamiltonianError::InvalidParameter(format!("{name} required for this family")))
    };
    let shape = match spec.family {
        Family::Quadratic => Shape::Polynomial { alpha: a / l, beta: 0.0 },
        Family::Cubic => {
            let theta = param("theta", spec.theta)?;
            if theta <= -1.0 || theta > 1.0 {
                let r = if theta <= -1.0 { r_max } else { 1.0 };
                return Err(HamiltonianError::ConvexityViolation { r, value: 0.0 });
            }
            Shape::Polynomial { alpha: (1.0 - theta) * a / l, beta: 2.0 * theta * a / (l * l) }
        }
        Family::Exponential => {
            let gamma = param("gamma", spec.gamma)?;
            if gamma.abs() < 1e-8 {
                Shape::Polynomial { alpha: a / l, beta: 0.0 }
            } else {
                Shape::Exponential { alpha: a * gamma / (gamma * l).exp_m1(), gamma }
            }
        }
        Family::Spline => spline_shape(spec.knots.as_deref().unwrap_or(&[]), a, r_max)?,
    };
    let mut p = HamiltonianProfile { spec: spec.clone(), shape, scale: 1.0, c: 0.0, h_triple_nonneg_up_to: None };
    let top = p.shape.eval(l);
    if (top[1] - a).abs() > 1e-9 * a.max(1.0) {
        return Err(HamiltonianError::SlopeMismatch { found: top[1], slope: a });
    }
    p.c = r_max * a - (spec.base + top[0]);
    if p.c < a * (1.0 - 1e-12) {
        return Err(HamiltonianError::JoinDiscontinuity(format!("max action {} is below the slope {a}", p.c)));
    }
    p.certify(DEFAULT_GRID)?;
    Ok(p)
}

fn spline_shape(knots: &[[f64; 2]], a: f64, r_max: f64) -> Result<Shape, HamiltonianError> {
    if knots.len() < 2 {
        return Err(HamiltonianError::JoinDiscontinuity("spline needs at least two knots".into()));
    }
    let tol = 1e-12 * r_max;
    if (knots[0][0] - 1.0).abs() > tol || (knots[knots.len() - 1][0] - r_max).abs() > tol {
        return Err(HamiltonianError::JoinDiscontinuity(format!(
            "knots span [{}, {}] instead of [1, {r_max}]",
            knots[0][0],
            knots[knots.len() - 1][0]
        )));
    }
    if knots.windows(2).any(|w| w[1][0] <= w[0][0]) {
        return Err(HamiltonianError::InvalidParameter("knot positions must increase".into()));
    }
    for (i, k) in knots.iter().enumerate() {
        let interior = i > 0 && i + 1 < knots.len();
        if !k[1].is_finite() || k[1] < 0.0 || (interior && k[1] == 0.0) {
            return Err(HamiltonianError::ConvexityViolation { r: k[0], value: k[1] });
        }
    }
    if knots.windows(2).any(|w| w[0][1] == 0.0 && w[1][1] == 0.0) {
        return Err(HamiltonianError::ConvexityViolation { r: knots[0][0], value: 0.0 });
    }
    let mut xs: Vec<f64> = knots.iter().map(|k| k[0] - 1.0).collect();
    xs[0] = 0.0;
    let last = xs.len() - 1;
    xs[last] = r_max - 1.0;
    let v: Vec<f64> = knots.iter().map(|k| k[1]).collect();
    let mut d1 = vec![0.0];
    let mut d0 = vec![0.0];
    for i in 0..last {
        let w = xs[i + 1] - xs[i];
        let s = (v[i + 1] - v[i]) / w;
        d0.push(d0[i] + d1[i] * w + v[i] * w * w / 2.0 + s * w * w * w / 6.0);
        d1.push(d1[i] + v[i] * w + s * w * w / 2.0);
    }
    let found = d1[last];
    if (found - a).abs() > 1e-9 * a.max(1.0) {
        return Err(HamiltonianError::SlopeMismatch { found, slope: a });
    }
    Ok(Shape::Spline { xs, v, d1, d0 })
}

impl HamiltonianProfile {
    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn slope(&self) -> f64 {
        self.scale * self.spec.slope
    }

    pub fn r_max(&self) -> f64 {
        self.spec.r_max
    }

    /// Value on `(0, 1]`.
    pub fn base(&self) -> f64 {
        self.scale * self.spec.base
    }

    /// `c = A_h(r_max)`; beyond `r_max`, `h = a r - c`.
    pub fn intercept(&self) -> f64 {
        self.scale * self.c
    }

    pub fn admissibility(&self) -> Admissibility {
        self.spec.admissibility
    }

    /// Right end of the interval `[1, r0]` on which `h''' >= 0` was certified.
    pub fn h_triple_nonneg_up_to(&self) -> Option<f64> {
        self.h_triple_nonneg_up_to
    }

    /// `λ H`, which stays in the same family.
    pub fn scaled(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0, "scale must be positive");
        let mut p = self.clone();
        p.scale *= lambda;
        p
    }

    /// `(h, h', h'', h''')` at `r > 0`, one-sided at the joins.
    pub fn derivatives(&self, r: f64) -> [f64; 4] {
        let s = self.scale;
        if r <= 1.0 {
            return [s * self.spec.base, 0.0, 0.0, 0.0];
        }
        if r >= self.spec.r_max {
            return [s * (self.spec.slope * r - self.c), s * self.spec.slope, 0.0, 0.0];
        }
        let v = self.shape.eval(r - 1.0);
        [s * (self.spec.base + v[0]), s * v[1], s * v[2], s * v[3]]
    }

    pub fn h(&self, r: f64) -> f64 {
        self.derivatives(r)[0]
    }

    pub fn dh(&self, r: f64) -> f64 {
        self.derivatives(r)[1]
    }

    pub fn d2h(&self, r: f64) -> f64 {
        self.derivatives(r)[2]
    }

    pub fn d3h(&self, r: f64) -> f64 {
        self.derivatives(r)[3]
    }

    /// `A_h(r) = r h'(r) - h(r)`.
    pub fn action_a(&self, r: f64) -> f64 {
        let [h, dh, _, _] = self.derivatives(r);
        r * dh - h
    }

    /// Solves `h'(r) = T` on `[1, r_max]`: bisection to `1e-12`, then one Newton step.
    pub fn level_for_period(&self, t: f64) -> Result<f64, HamiltonianError> {
        let a = self.slope();
        let slack = 1e-12 * a.max(1.0);
        if !t.is_finite() || t < -slack || t > a + slack {
            return Err(HamiltonianError::PeriodOutOfRange { period: t, slope: a });
        }
        if t <= 0.0 {
            return Ok(1.0);
        }
        if t >= a {
            return Ok(self.spec.r_max);
        }
        let (mut lo, mut hi) = (1.0, self.spec.r_max);
        while hi - lo > ROOT_TOL {
            let mid = 0.5 * (lo + hi);
            if self.dh(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = 0.5 * (lo + hi);
        let d2 = self.d2h(r);
        if d2 > 0.0 {
            let polished = r - (self.dh(r) - t) / d2;
            if (polished - r).abs() <= 2.0 * ROOT_TOL && polished > 1.0 && polished < self.spec.r_max {
                return Ok(polished);
            }
        }
        Ok(r)
    }

    /// `(𝔞_H(T), r)` with `h'(r) = T`.
    pub fn action_from_period(&self, t: f64) -> Result<(f64, f64), HamiltonianError> {
        let r = self.level_for_period(t)?;
        Ok((self.action_a(r), r))
    }

    /// Inverts `A_h` on `[1, r_max]`, returning the smallest level with the given action.
    pub fn level_for_action(&self, value: f64) -> Result<f64, HamiltonianError> {
        let (lo_v, hi_v) = (self.action_a(1.0), self.intercept());
        let slack = 1e-12 * hi_v.abs().max(1.0);
        if !value.is_finite() || value < lo_v - slack || value > hi_v + slack {
            return Err(HamiltonianError::OutOfRange { tau: value, lo: lo_v, hi: hi_v });
        }
        if value <= lo_v {
            return Ok(1.0);
        }
        if value >= hi_v {
            return Ok(self.spec.r_max);
        }
        let (mut lo, mut hi) = (1.0, self.spec.r_max);
        while hi - lo > ROOT_TOL {
            let mid = 0.5 * (lo + hi);
            if self.action_a(mid) < value {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Scans `h'''` on the grid and records the certified region `[1, r0]`;
    /// also checks monotonicity, convexity and the joins.
    fn certify(&mut self, grid: usize) -> Result<(), HamiltonianError> {
        let r_max = self.spec.r_max;
        let step = (r_max - 1.0) / grid as f64;
        let mut certified = Some(r_max);
        let mut prev_h = self.h(1.0);
        for i in 0..=grid {
            let r = 1.0 + step * i as f64;
            let [h, dh, d2, d3] = self.derivatives(r.min(r_max - 1e-15).max(1.0 + 1e-15));
            if h < prev_h - 1e-12 * h.abs().max(1.0) || dh < -1e-12 {
                return Err(HamiltonianError::ConvexityViolation { r, value: d2 });
            }
            let interior = i > 0 && i < grid;
            if d2 < -1e-12 || (interior && d2 <= 0.0) {
                return Err(HamiltonianError::ConvexityViolation { r, value: d2 });
            }
            if certified == Some(r_max) && d3 < -1e-12 {
                certified = if i == 0 { None } else { Some(1.0 + step * (i - 1) as f64) };
            }
            prev_h = h;
        }
        if self.dh(1.0 + 1e-15).abs() > 1e-9 * self.slope() {
            return Err(HamiltonianError::JoinDiscontinuity("h'(1) != 0".into()));
        }
        let gap = (self.h(r_max - 1e-13) - (self.slope() * r_max - self.intercept())).abs();
        if gap > 1e-9 * self.intercept().abs().max(1.0) {
            return Err(HamiltonianError::JoinDiscontinuity(format!("h jumps by {gap:.3e} at r_max")));
        }
        self.h_triple_nonneg_up_to = certified;
        Ok(())
    }

    /// Tables of `(r, h, h', h'', A_h)` on `[1, r_max]` and `(T, 𝔞, r)` on `[0, a]`.
    pub fn action_tables(&self, grid: usize) -> Result<ActionTables, HamiltonianError> {
        let grid = grid.max(2);
        let r_max = self.spec.r_max;
        let levels = (0..=grid)
            .map(|i| {
                let r = 1.0 + (r_max - 1.0) * i as f64 / grid as f64;
                let [h, dh, d2, _] = self.derivatives(r);
                LevelRow { r, h, dh, d2h: d2, action: r * dh - h }
            })
            .collect();
        let periods = (0..=grid)
            .map(|i| {
                let t = self.slope() * i as f64 / grid as f64;
                let (action, r) = self.action_from_period(t)?;
                Ok(PeriodRow { t, action, r })
            })
            .collect::<Result<_, _>>()?;
        Ok(ActionTables { levels, periods })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelRow {
    pub r: f64,
    pub h: f64,
    pub dh: f64,
    pub d2h: f64,
    pub action: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodRow {
    pub t: f64,
    pub action: f64,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionTables {
    pub levels: Vec<LevelRow>,
    pub periods: Vec<PeriodRow>,
}

impl ActionTables {
    pub fn write_levels_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.levels {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_periods_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.periods {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> HamiltonianProfile {
        ProfileSpec::quadratic(6.0, 2.0).build().unwrap()
    }

    #[test]
    fn quadratic_closed_form() {
        let p = quad();
        assert_eq!(p.h_triple_nonneg_up_to(), Some(2.0));
        // h = 3 (r-1)^2, A = r h' - h = 3 (r^2 - 1)
        for r in [1.0, 1.25, 1.5, 1.9, 2.0] {
            assert!((p.action_a(r) - 3.0 * (r * r - 1.0)).abs() < 1e-12);
        }
        assert_eq!(p.action_a(0.5), 0.0);
        assert!((p.intercept() - 9.0).abs() < 1e-12);
        assert!((p.action_a(3.0) - 9.0).abs() < 1e-12);
        assert!(p.intercept() >= p.slope());
    }

    #[test]
    fn period_inversion() {
        let p = quad();
        assert_eq!(p.action_from_period(0.0).unwrap(), (0.0, 1.0));
        let (act, r) = p.action_from_period(6.0).unwrap();
        assert_eq!(r, 2.0);
        assert!((act - p.intercept()).abs() < 1e-12);
        let (act, r) = p.action_from_period(3.0).unwrap();
        assert!((r - 1.5).abs() < 1e-12);
        assert!((act - 3.75).abs() < 1e-10);
        assert!(matches!(p.action_from_period(7.0), Err(HamiltonianError::PeriodOutOfRange { .. })));
    }

    #[test]
    fn cubic_and_exponential_families() {
        let cubic = ProfileSpec::cubic(4.0, 3.0, 0.5).build().unwrap();
        assert_eq!(cubic.h_triple_nonneg_up_to(), Some(3.0));
        assert!(cubic.d3h(2.0) > 0.0);
        let bent = ProfileSpec::cubic(4.0, 3.0, -0.5).build().unwrap();
        assert_eq!(bent.h_triple_nonneg_up_to(), None);
        let exp = ProfileSpec::exponential(5.0, 2.5, 1.3).build().unwrap();
        assert!((exp.dh(2.5 - 1e-12) - 5.0).abs() < 1e-9);
        let exp_neg = ProfileSpec::exponential(5.0, 2.5, -1.3).build().unwrap();
        assert_eq!(exp_neg.h_triple_nonneg_up_to(), None);
    }

    #[test]
    fn spline_profiles() {
        // h'' = 4 on [1, 2]: slope 4.
        let p = ProfileSpec::spline(4.0, 2.0, vec![[1.0, 4.0], [1.5, 4.0], [2.0, 4.0]]).build().unwrap();
        let q = ProfileSpec::quadratic(4.0, 2.0).build().unwrap();
        for r in [1.1, 1.5, 1.75, 2.5] {
            assert!((p.h(r) - q.h(r)).abs() < 1e-12);
        }
        let neg = ProfileSpec::spline(1.0, 2.0, vec![[1.0, 2.0], [1.5, -1.0], [2.0, 3.0]]).build();
        assert!(matches!(neg, Err(HamiltonianError::ConvexityViolation { r, .. }) if r == 1.5));
        let wrong = ProfileSpec::spline(5.0, 2.0, vec![[1.0, 4.0], [2.0, 4.0]]).build();
        assert!(matches!(wrong, Err(HamiltonianError::SlopeMismatch { .. })));
        let short = ProfileSpec::spline(2.0, 2.0, vec![[1.0, 4.0], [1.5, 4.0]]).build();
        assert!(matches!(short, Err(HamiltonianError::JoinDiscontinuity(_))));
        // increasing then decreasing h'': certified up to the peak
        let peak = ProfileSpec::spline(2.0, 2.0, vec![[1.0, 1.0], [1.5, 3.0], [2.0, 1.0]]).build().unwrap();
        let r0 = peak.h_triple_nonneg_up_to().unwrap();
        assert!((r0 - 1.5).abs() < 1e-3, "{r0}");
    }

    #[test]
    fn admissible_shift() {
        let p = ProfileSpec::quadratic(6.0, 2.0).admissible(-1.0).build().unwrap();
        assert_eq!(p.action_a(0.5), 1.0);
        assert!((p.intercept() - 10.0).abs() < 1e-12);
        assert!(ProfileSpec { base: -1.0, ..ProfileSpec::quadratic(6.0, 2.0) }.build().is_err());
    }

    #[test]
    fn scaling_identities() {
        let p = ProfileSpec::exponential(5.0, 2.5, 0.7).build().unwrap();
        let q = p.scaled(3.0);
        for r in [0.5, 1.2, 2.0, 3.0] {
            assert!((q.action_a(r) - 3.0 * p.action_a(r)).abs() < 1e-12);
        }
        for t in [0.0, 1.0, 4.0, 12.0, 15.0] {
            let lhs = q.action_from_period(t).unwrap().0;
            let rhs = 3.0 * p.action_from_period(t / 3.0).unwrap().0;
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn spec_json() {
        let spec: ProfileSpec =
            serde_json::from_str(r#"{"family": "cubic", "slope": 4, "r_max": 3, "theta": 0.25}"#).unwrap();
        assert!(spec.build().is_ok());
        assert!(serde_json::from_str::<ProfileSpec>(r#"{"family": "cubic", "slope": 4, "r_max": 3, "x": 1}"#).is_err());
    }
}
