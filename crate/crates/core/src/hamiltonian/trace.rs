//! Validation of sampled radial traces `(s, t) ↦ r(u(s, t))` of Floer cylinders.
//!
//! The checks run on the data as given:
//!
//! * maximum principle: `max_t r(s, ·) <= r⁺`,
//! * monotonicity: `max_t r(s, ·) >= r⁻`,
//! * the averaged inequality `d/ds ∫ r dt <= -k A_h(r⁻) + ∫ A_h(r) dt`, with a
//!   forward difference on the left and the trapezoid average on the right,
//! * `μ(s, ρ) ρ <= r⁺ E / A_h(r⁺)` with `E = k (A_h(r⁺) - A_h(r⁻))`, where
//!   `μ(s, ρ)` is the measure of `{t : r(s, t) <= r⁺ - ρ}`.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{HamiltonianError, HamiltonianProfile};

/// Trace samples on a product grid. `r[i][j]` is the value at `(s[i], t[j])`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderTrace {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub r: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct Row {
    s: f64,
    t: f64,
    r: f64,
}

fn malformed(msg: impl Into<String>) -> HamiltonianError {
    HamiltonianError::MalformedTrace(msg.into())
}

impl CylinderTrace {
    pub fn new(s: Vec<f64>, t: Vec<f64>, r: Vec<Vec<f64>>) -> Result<Self, HamiltonianError> {
        if s.len() < 2 || t.is_empty() {
            return Err(malformed("need at least two s-values and one t-value"));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) || t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(malformed("s and t must be strictly increasing"));
        }
        if r.len() != s.len() || r.iter().any(|row| row.len() != t.len()) {
            return Err(malformed("r must be an |s| x |t| array"));
        }
        if s.iter().chain(&t).chain(r.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(malformed("non-finite sample"));
        }
        Ok(Self { s, t, r })
    }

    /// `r(s, t) = f(s, t)` on a uniform grid.
    pub fn from_fn(s: &[f64], t_count: usize, period: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self, HamiltonianError> {
        let t: Vec<f64> = (0..t_count).map(|j| period * j as f64 / t_count as f64).collect();
        let r = s.iter().map(|&si| t.iter().map(|&tj| f(si, tj)).collect()).collect();
        Self::new(s.to_vec(), t, r)
    }

    /// Reads CSV with header `s,t,r`. Every `s` must carry the same `t` values.
    pub fn from_csv<R: Read>(input: R) -> Result<Self, HamiltonianError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let mut grid: BTreeMap<u64, BTreeMap<u64, f64>> = BTreeMap::new();
        let key = |x: f64| if x == 0.0 { 0.0f64.to_bits() } else { x.to_bits() };
        for row in reader.deserialize::<Row>() {
            let row = row.map_err(|e| malformed(e.to_string()))?;
            if !(row.s.is_finite() && row.t.is_finite() && row.r.is_finite()) {
                return Err(malformed("non-finite sample"));
            }
            grid.entry(key(row.s)).or_default().insert(key(row.t), row.r);
        }
        let mut s_vals: Vec<(f64, &BTreeMap<u64, f64>)> = grid.iter().map(|(k, v)| (f64::from_bits(*k), v)).collect();
        s_vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let first = s_vals.first().ok_or_else(|| malformed("empty trace"))?.1;
        let mut t: Vec<f64> = first.keys().map(|k| f64::from_bits(*k)).collect();
        t.sort_by(f64::total_cmp);
        let mut r = Vec::new();
        for (s, row) in &s_vals {
            if row.len() != t.len() {
                return Err(malformed(format!("s = {s} has {} t-values, expected {}", row.len(), t.len())));
            }
            let vals: Option<Vec<f64>> = t.iter().map(|tv| row.get(&key(*tv)).copied()).collect();
            r.push(vals.ok_or_else(|| malformed(format!("s = {s} uses a different t-grid")))?);
        }
        Self::new(s_vals.iter().map(|(s, _)| *s).collect(), t, r)
    }

    /// Periodic trapezoid weights on `[0, period)`.
    fn weights(&self, period: f64) -> Vec<f64> {
        let n = self.t.len();
        (0..n)
            .map(|j| {
                let next = if j + 1 < n { self.t[j + 1] } else { self.t[0] + period };
                let prev = if j > 0 { self.t[j - 1] } else { self.t[n - 1] - period };
                0.5 * (next - prev)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub pass: bool,
    /// Smallest slack over the data (negative when failing).
    pub worst_slack: f64,
    /// `s` at which the worst slack occurs.
    pub at_s: f64,
}

impl InequalityCheck {
    fn new() -> Self {
        Self { pass: true, worst_slack: f64::INFINITY, at_s: f64::NAN }
    }

    fn record(&mut self, slack: f64, s: f64, tol: f64) {
        if slack < self.worst_slack {
            self.worst_slack = slack;
            self.at_s = s;
        }
        if slack < -tol {
            self.pass = false;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReport {
    pub max_principle: InequalityCheck,
    pub monotonicity: InequalityCheck,
    pub averaged_inequality: InequalityCheck,
    pub measure_bound: InequalityCheck,
    pub energy: f64,
}

impl TraceReport {
    pub fn all_pass(&self) -> bool {
        self.max_principle.pass && self.monotonicity.pass && self.averaged_inequality.pass && self.measure_bound.pass
    }
}

/// Runs the four checks on `trace` for the multiple `k H` with ends at `r⁺`, `r⁻`.
pub fn cylinder_trace_check(
    trace: &CylinderTrace,
    profile: &HamiltonianProfile,
    k: f64,
    r_plus: f64,
    r_minus: f64,
) -> Result<TraceReport, HamiltonianError> {
    if !(k > 0.0 && r_minus > 1.0 && r_minus <= r_plus && r_plus <= profile.r_max()) {
        return Err(malformed(format!("need k > 0 and 1 < r⁻ <= r⁺ <= r_max, got k={k}, r⁻={r_minus}, r⁺={r_plus}")));
    }
    if trace.t.iter().any(|t| *t < 0.0 || *t >= k) {
        return Err(malformed(format!("t-values must lie in [0, {k})")));
    }
    let tol = 1e-9 * profile.intercept().max(1.0) * k.max(1.0);
    let w = trace.weights(k);
    let a_plus = profile.action_a(r_plus);
    let a_minus = profile.action_a(r_minus);
    let energy = k * (a_plus - a_minus);

    let mut max_principle = InequalityCheck::new();
    let mut monotonicity = InequalityCheck::new();
    let mut measure_bound = InequalityCheck::new();
    let mut integral_r = Vec::with_capacity(trace.s.len());
    let mut integral_a = Vec::with_capacity(trace.s.len());
    let cap = if a_plus > 0.0 { r_plus * energy / a_plus } else { f64::INFINITY };
    for (row, &s) in trace.r.iter().zip(&trace.s) {
        let top = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max_principle.record(r_plus - top, s, 1e-12);
        monotonicity.record(top - r_minus, s, 1e-12);
        integral_r.push(row.iter().zip(&w).map(|(r, w)| r * w).sum::<f64>());
        integral_a.push(row.iter().zip(&w).map(|(r, w)| profile.action_a(*r) * w).sum::<f64>());
        for &level in row {
            let rho = r_plus - level;
            if rho <= 0.0 {
                continue;
            }
            let measure: f64 = row.iter().zip(&w).filter(|(r, _)| **r <= r_plus - rho).map(|(_, w)| w).sum();
            measure_bound.record(cap - measure * rho, s, tol);
        }
    }
    let mut averaged_inequality = InequalityCheck::new();
    for i in 0..trace.s.len() - 1 {
        let ds = trace.s[i + 1] - trace.s[i];
        let lhs = (integral_r[i + 1] - integral_r[i]) / ds;
        let rhs = -k * a_minus + 0.5 * (integral_a[i] + integral_a[i + 1]);
        averaged_inequality.record(rhs - lhs, trace.s[i], tol);
    }
    Ok(TraceReport { max_principle, monotonicity, averaged_inequality, measure_bound, energy })
}
