//! Search for and exact verification of index recurrence sequences.
//!
//! For profiles `Φ_0..Φ_q` with positive mean index, a solution is an integer
//! `d` and iterates `k_i` such that for `1 <= ℓ <= ℓ0`:
//!
//! * IR1: `|μ̂(Φ_i^{k_i}) - d| < η`,
//! * IR2: `μ±(Φ_i^{k_i+ℓ}) = d + μ±(Φ_i^ℓ)`,
//! * IR3: `μ+(Φ_i^{k_i-ℓ}) = d - μ-(Φ_i^ℓ) + b+(Φ_i^ℓ) - b-(Φ_i^ℓ)`.
//!
//! All index values come from [`IterationProfile::iterate`], so verification is
//! exact integer arithmetic apart from the mean-index comparison in IR1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::IterationProfile;

/// Number of `k0` candidates handed to one parallel batch.
const BATCH: u64 = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecurrenceError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("orbit {orbit}: iterate k = {k} leaves k - ℓ0 < 1 for ℓ0 = {ell0}")]
    IterateUnderflow { orbit: usize, k: u64, ell0: u64 },
    #[error("orbit {orbit}: μ-(Φ) = {mu_minus} is below the required {required}")]
    HypothesisFailed { orbit: usize, mu_minus: i64, required: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceQuery {
    pub profiles: Vec<IterationProfile>,
    pub eta: f64,
    pub ell0: u64,
    /// Every `d` and `k_i` is a multiple of this.
    #[serde(default = "one", alias = "N")]
    pub divisor: u64,
    /// Largest `k0` scanned.
    pub k_bound: u64,
    /// Number of solutions requested.
    pub count: usize,
}

fn one() -> u64 {
    1
}

impl RecurrenceQuery {
    pub fn new(profiles: Vec<IterationProfile>, eta: f64, ell0: u64) -> Self {
        Self { profiles, eta, ell0, divisor: 1, k_bound: 1_000_000, count: 3 }
    }

    pub fn validate(&self) -> Result<(), RecurrenceError> {
        let bad = |m: String| Err(RecurrenceError::InvalidQuery(m));
        if self.profiles.is_empty() {
            return bad("no profiles".into());
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return bad(format!("eta = {} must be positive", self.eta));
        }
        if self.ell0 == 0 || self.divisor == 0 || self.k_bound == 0 {
            return bad("ell0, divisor and k_bound must be positive".into());
        }
        for (i, p) in self.profiles.iter().enumerate() {
            p.validate().map_err(|e| RecurrenceError::InvalidQuery(format!("profile {i}: {e}")))?;
            let mh = p.mean_index();
            if !(mh > 0.0) {
                return bad(format!("profile {i} has mean index {mh} <= 0"));
            }
        }
        Ok(())
    }
}

/// An exact integer identity `lhs = rhs` or inequality `lhs <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntCheck {
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
}

impl IntCheck {
    fn eq(lhs: i64, rhs: i64) -> Self {
        Self { lhs, rhs, pass: lhs == rhs }
    }

    fn le(lhs: i64, rhs: i64) -> Self {
        Self { lhs, rhs, pass: lhs <= rhs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanIndexCheck {
    pub mu_hat: f64,
    pub gap: f64,
    pub pass: bool,
}

/// Checks at one `ℓ` for one profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllRecord {
    pub ell: u64,
    pub ir2_minus: IntCheck,
    pub ir2_plus: IntCheck,
    pub ir3: IntCheck,
    /// `μ+(Φ^{k-ℓ}) <= d - μ-(Φ^ℓ) + ν_a(Φ^ℓ)`.
    pub nu_a_bound: IntCheck,
    /// `μ(Φ^{k-ℓ}) = d - μ(Φ^ℓ)`, present when both iterates are non-degenerate.
    pub nondegenerate: Option<IntCheck>,
}

impl EllRecord {
    pub fn pass(&self) -> bool {
        self.ir2_minus.pass
            && self.ir2_plus.pass
            && self.ir3.pass
            && self.nu_a_bound.pass
            && self.nondegenerate.is_none_or(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileCertificate {
    pub orbit: usize,
    pub k: u64,
    pub ir1: MeanIndexCheck,
    pub ells: Vec<EllRecord>,
}

impl ProfileCertificate {
    pub fn pass(&self) -> bool {
        self.ir1.pass && self.ells.iter().all(EllRecord::pass)
    }

    /// First failing `ℓ`, if any.
    pub fn first_failure(&self) -> Option<&EllRecord> {
        self.ells.iter().find(|r| !r.pass())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrCertificate {
    pub d: i64,
    pub eta: f64,
    pub ell0: u64,
    pub divisor: u64,
    pub divisible: bool,
    pub profiles: Vec<ProfileCertificate>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceSolution {
    pub d: i64,
    pub k: Vec<u64>,
    pub certificate: IrCertificate,
}

fn check_profile(orbit: usize, p: &IterationProfile, d: i64, k: u64, eta: f64, ell0: u64) -> ProfileCertificate {
    let mu_hat = p.mean_index() * k as f64;
    let gap = (mu_hat - d as f64).abs();
    let ir1 = MeanIndexCheck { mu_hat, gap, pass: gap < eta };
    let ells = (1..=ell0)
        .map(|ell| {
            let base = p.iterate(ell);
            let up = p.iterate(k + ell).triple;
            let down = p.iterate(k - ell).triple;
            let b = base.triple;
            let corr = base.b_plus as i64 - base.b_minus as i64;
            let nondegenerate = match (down.mu(), b.mu()) {
                (Some(x), Some(y)) => Some(IntCheck::eq(x, d - y)),
                _ => None,
            };
            EllRecord {
                ell,
                ir2_minus: IntCheck::eq(up.mu_minus, d + b.mu_minus),
                ir2_plus: IntCheck::eq(up.mu_plus, d + b.mu_plus),
                ir3: IntCheck::eq(down.mu_plus, d - b.mu_minus + corr),
                nu_a_bound: IntCheck::le(down.mu_plus, d - b.mu_minus + base.nu_a as i64),
                nondegenerate,
            }
        })
        .collect();
    ProfileCertificate { orbit, k, ir1, ells }
}

/// Verifies IR1-IR3, the two corollaries and divisibility by `divisor`.
pub fn verify_ir(
    profiles: &[IterationProfile],
    d: i64,
    k: &[u64],
    eta: f64,
    ell0: u64,
    divisor: u64,
) -> Result<IrCertificate, RecurrenceError> {
    if profiles.len() != k.len() {
        return Err(RecurrenceError::InvalidQuery(format!("{} profiles but {} iterates", profiles.len(), k.len())));
    }
    if divisor == 0 || ell0 == 0 {
        return Err(RecurrenceError::InvalidQuery("divisor and ell0 must be positive".into()));
    }
    if let Some((orbit, &ki)) = k.iter().enumerate().find(|(_, ki)| **ki <= ell0) {
        return Err(RecurrenceError::IterateUnderflow { orbit, k: ki, ell0 });
    }
    let certs: Vec<ProfileCertificate> =
        profiles.iter().zip(k).enumerate().map(|(i, (p, &ki))| check_profile(i, p, d, ki, eta, ell0)).collect();
    let divisible = d % divisor as i64 == 0 && k.iter().all(|ki| ki % divisor == 0);
    let pass = divisible && certs.iter().all(ProfileCertificate::pass);
    Ok(IrCertificate { d, eta, ell0, divisor, divisible, profiles: certs, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub solutions: Vec<RecurrenceSolution>,
    /// Fewer than `count` solutions exist with `k0 <= k_bound`. This is not a
    /// refutation: the sequences are infinite but the horizon is not effective.
    pub horizon_exhausted: bool,
    /// Largest `k0` examined.
    pub scanned_up_to: u64,
}

/// Multiples of `n` within `eta` of `x`, nearest first.
fn multiples_near(x: f64, eta: f64, n: u64) -> Vec<i64> {
    let n = n as f64;
    let lo = ((x - eta) / n).ceil() as i64;
    let hi = ((x + eta) / n).floor() as i64;
    let mut out: Vec<i64> = (lo..=hi).map(|j| j * n as i64).filter(|v| (*v as f64 - x).abs() < eta).collect();
    out.sort_by(|a, b| (*a as f64 - x).abs().total_cmp(&(*b as f64 - x).abs()).then(a.cmp(b)));
    out
}

fn candidate(q: &RecurrenceQuery, k0: u64) -> Option<RecurrenceSolution> {
    let p0 = &q.profiles[0];
    let x0 = p0.mean_index() * k0 as f64;
    for d in multiples_near(x0, q.eta, q.divisor) {
        if d <= 0 || !check_profile(0, p0, d, k0, q.eta, q.ell0).pass() {
            continue;
        }
        let mut ks = vec![k0];
        for (i, p) in q.profiles.iter().enumerate().skip(1) {
            let mh = p.mean_index();
            let n = q.divisor;
            let lo = (((d as f64 - q.eta) / mh / n as f64).ceil().max(1.0)) as u64 * n;
            let hi = (((d as f64 + q.eta) / mh / n as f64).floor().max(0.0)) as u64 * n;
            let found = (lo..=hi)
                .step_by(n as usize)
                .filter(|&ki| ki > q.ell0)
                .find(|&ki| check_profile(i, p, d, ki, q.eta, q.ell0).pass());
            match found {
                Some(ki) => ks.push(ki),
                None => break,
            }
        }
        if ks.len() == q.profiles.len() {
            let certificate = verify_ir(&q.profiles, d, &ks, q.eta, q.ell0, q.divisor).ok()?;
            return certificate.pass.then_some(RecurrenceSolution { d, k: ks, certificate });
        }
    }
    None
}

/// Scans `k0 = N, 2N, ... <= k_bound` in order, calling `emit` for each
/// solution as soon as its batch completes. Output is identical to a
/// sequential scan regardless of the thread count.
pub fn recurrence_search_with(
    q: &RecurrenceQuery,
    mut emit: impl FnMut(&RecurrenceSolution),
) -> Result<SearchOutcome, RecurrenceError> {
    q.validate()?;
    let mut solutions: Vec<RecurrenceSolution> = Vec::new();
    let n = q.divisor;
    let first = (q.ell0 / n + 1) * n;
    let mut start = first;
    let mut scanned_up_to = 0;
    while start <= q.k_bound && solutions.len() < q.count {
        let end = start.saturating_add(BATCH * n).min(q.k_bound.saturating_add(1));
        let steps = (end - start).div_ceil(n);
        let batch: Vec<RecurrenceSolution> =
            (0..steps).into_par_iter().filter_map(|j| candidate(q, start + j * n)).collect();
        for sol in batch {
            if solutions.len() >= q.count {
                break;
            }
            if solutions.last().is_some_and(|last| sol.d <= last.d) {
                continue;
            }
            scanned_up_to = sol.k[0];
            emit(&sol);
            solutions.push(sol);
        }
        if solutions.len() < q.count {
            scanned_up_to = end - 1 - (end - 1 - start) % n;
        }
        start = end;
    }
    let horizon_exhausted = solutions.len() < q.count;
    Ok(SearchOutcome { solutions, horizon_exhausted, scanned_up_to })
}

pub fn recurrence_search(q: &RecurrenceQuery) -> Result<SearchOutcome, RecurrenceError> {
    recurrence_search_with(q, |_| {})
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapRecord {
    pub orbit: usize,
    pub ell: u64,
    pub mu_plus: i64,
    pub bound: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub d: i64,
    pub records: Vec<GapRecord>,
    pub pass: bool,
}

/// Checks `μ+(Φ_i^{k_i-ℓ}) <= d - 2` for `1 <= ℓ <= ℓ0`, given `μ-(Φ_i) >= m + 2`.
pub fn dynamically_convex_gap(
    profiles: &[IterationProfile],
    solution: &RecurrenceSolution,
    m: usize,
) -> Result<GapReport, RecurrenceError> {
    let required = m as i64 + 2;
    for (orbit, p) in profiles.iter().enumerate() {
        let mu_minus = p.iterate(1).triple.mu_minus;
        if mu_minus < required {
            return Err(RecurrenceError::HypothesisFailed { orbit, mu_minus, required });
        }
    }
    if profiles.len() != solution.k.len() {
        return Err(RecurrenceError::InvalidQuery("profile count does not match the solution".into()));
    }
    let ell0 = solution.certificate.ell0;
    let d = solution.d;
    let mut records = Vec::new();
    for (orbit, (p, &k)) in profiles.iter().zip(&solution.k).enumerate() {
        if k <= ell0 {
            return Err(RecurrenceError::IterateUnderflow { orbit, k, ell0 });
        }
        for ell in 1..=ell0 {
            let mu_plus = p.iterate(k - ell).triple.mu_plus;
            records.push(GapRecord { orbit, ell, mu_plus, bound: d - 2, pass: mu_plus <= d - 2 });
        }
    }
    let pass = records.iter().all(|r| r.pass);
    Ok(GapReport { d, records, pass })
}
