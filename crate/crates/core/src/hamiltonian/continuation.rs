//! Monotone continuation between multiples of a profile.
//!
//! For the homotopy `F_s = (k + sλ) H`, an orbit of period `T` sits at the level
//! `r(s)` with `(k + sλ) h'(r(s)) = T` and has action `(k + sλ) A_h(r(s))`, whose
//! `s`-derivative is `-λ h(r(s))`. Composing the endpoints gives the transfer map
//! `f = 𝔞_{(k+λ)H} ∘ 𝔞_{kH}⁻¹` with `τ >= f(τ) >= τ - λ h(r_max)`.

use serde::Serialize;

use super::{HamiltonianError, HamiltonianProfile};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominanceCertificate {
    /// `max_T (𝔞_{H1}(T) - 𝔞_{H0}(T))`; nonpositive up to rounding when `H1 >= H0`.
    pub max_violation: f64,
    /// Worst `T`.
    pub at_period: f64,
    /// `min_r (H1 - H0)` over the level grid.
    pub min_gap: f64,
    pub grid: usize,
}

/// Certifies `𝔞_{H1} <= 𝔞_{H0}` on `[0, slope(H0)]` for `H1 >= H0`.
pub fn compare_action_functions(
    h0: &HamiltonianProfile,
    h1: &HamiltonianProfile,
    grid: usize,
) -> Result<DominanceCertificate, HamiltonianError> {
    let grid = grid.max(2);
    if h0.slope() > h1.slope() {
        return Err(HamiltonianError::InvalidParameter(format!(
            "slope(H0) = {} exceeds slope(H1) = {}",
            h0.slope(),
            h1.slope()
        )));
    }
    let r_hi = h0.r_max().max(h1.r_max()) * 1.5;
    let mut min_gap = f64::INFINITY;
    for i in 0..=grid {
        let r = 0.5 + (r_hi - 0.5) * i as f64 / grid as f64;
        let gap = h1.h(r) - h0.h(r);
        let scale = h0.h(r).abs().max(1.0);
        if gap < -1e-12 * scale {
            return Err(HamiltonianError::NotDominated { r, gap });
        }
        min_gap = min_gap.min(gap);
    }
    let mut cert = DominanceCertificate { max_violation: f64::NEG_INFINITY, at_period: 0.0, min_gap, grid };
    for i in 0..=grid {
        let t = h0.slope() * i as f64 / grid as f64;
        let v = h1.action_from_period(t)?.0 - h0.action_from_period(t)?.0;
        if v > cert.max_violation {
            cert.max_violation = v;
            cert.at_period = t;
        }
    }
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferPoint {
    pub tau: f64,
    pub f: f64,
    /// `τ - f(τ)`, nonnegative.
    pub upper_slack: f64,
    /// `f(τ) - (τ - λ h(r_max))`, nonnegative.
    pub lower_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    pub k: f64,
    pub lambda: f64,
    pub points: Vec<TransferPoint>,
    pub min_slack: f64,
    /// `f` is nondecreasing along the sorted grid.
    pub monotone: bool,
}

/// Evaluates `f = 𝔞_{(k+λ)H} ∘ 𝔞_{kH}⁻¹` on the given actions.
pub fn transfer_map(
    profile: &HamiltonianProfile,
    k: f64,
    lambda: f64,
    taus: &[f64],
) -> Result<TransferReport, HamiltonianError> {
    if !(k >= 1.0 && lambda > 0.0 && k.is_finite() && lambda.is_finite()) {
        return Err(HamiltonianError::InvalidParameter(format!("need k >= 1 and λ > 0, got k={k}, λ={lambda}")));
    }
    let lo = k * profile.action_a(1.0);
    let hi = k * profile.intercept();
    let drop = lambda * profile.h(profile.r_max());
    let mut points = Vec::with_capacity(taus.len());
    for &tau in taus {
        if !(tau >= lo - 1e-12 && tau <= hi * (1.0 + 1e-12)) {
            return Err(HamiltonianError::OutOfRange { tau, lo, hi });
        }
        let r = profile.level_for_action((tau / k).clamp(lo / k, hi / k))?;
        let period = k * profile.dh(r);
        let r2 = profile.level_for_period((period / (k + lambda)).min(profile.slope()))?;
        let f = (k + lambda) * profile.action_a(r2);
        points.push(TransferPoint { tau, f, upper_slack: tau - f, lower_slack: f - (tau - drop) });
    }
    let min_slack = points.iter().map(|p| p.upper_slack.min(p.lower_slack)).fold(f64::INFINITY, f64::min);
    let mut sorted: Vec<_> = points.iter().map(|p| (p.tau, p.f)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = sorted.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-9 * w[0].1.abs().max(1.0));
    Ok(TransferReport { k, lambda, points, min_slack, monotone })
}

fn level_on_homotopy(
    profile: &HamiltonianProfile,
    k: f64,
    lambda: f64,
    s: f64,
    t: f64,
) -> Result<f64, HamiltonianError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(HamiltonianError::InvalidParameter(format!("s = {s} outside [0, 1]")));
    }
    let factor = k + s * lambda;
    let max_t = factor * profile.slope();
    if !(0.0..=max_t * (1.0 + 1e-12)).contains(&t) {
        return Err(HamiltonianError::PeriodOutOfRange { period: t, slope: max_t });
    }
    profile.level_for_period((t / factor).min(profile.slope()))
}

/// `𝔞_{F_s}(T) = (k + sλ) A_h(r(s))`.
pub fn homotopy_action(
    profile: &HamiltonianProfile,
    k: f64,
    lambda: f64,
    s: f64,
    t: f64,
) -> Result<f64, HamiltonianError> {
    let r = level_on_homotopy(profile, k, lambda, s, t)?;
    Ok((k + s * lambda) * profile.action_a(r))
}

/// `d/ds 𝔞_{F_s}(T) = -λ h(r(s))`.
pub fn homotopy_action_derivative(
    profile: &HamiltonianProfile,
    k: f64,
    lambda: f64,
    s: f64,
    t: f64,
) -> Result<f64, HamiltonianError> {
    let r = level_on_homotopy(profile, k, lambda, s, t)?;
    Ok(-lambda * profile.h(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ProfileSpec;

    #[test]
    fn dominance() {
        let h0 = ProfileSpec::quadratic(4.0, 2.0).build().unwrap();
        let same = compare_action_functions(&h0, &h0, 256).unwrap();
        assert!(same.max_violation.abs() < 1e-12);
        let double = compare_action_functions(&h0, &h0.scaled(2.0), 256).unwrap();
        assert!(double.max_violation <= 1e-12);
        let below = ProfileSpec::quadratic(4.0, 2.5).build().unwrap();
        assert!(matches!(compare_action_functions(&h0, &below, 256), Err(HamiltonianError::NotDominated { .. })));
    }

    #[test]
    fn transfer_examples() {
        let p = ProfileSpec::quadratic(6.0, 2.0).build().unwrap();
        let r = transfer_map(&p, 3.0, 2.0, &[0.0, 1.0, 10.0, 27.0]).unwrap();
        assert_eq!(r.points[0].f, 0.0);
        let f1 = r.points[1].f;
        assert!(f1 <= 1.0 && f1 >= 1.0 - 2.0 * p.h(2.0));
        // closed form: r = sqrt(1 + τ/(3k)), r' - 1 = k (r - 1)/(k + λ)
        let rr = (1.0f64 + 1.0 / 9.0).sqrt();
        let r2 = 1.0 + 3.0 * (rr - 1.0) / 5.0;
        assert!((f1 - 5.0 * 3.0 * (r2 * r2 - 1.0)).abs() < 1e-9);
        assert!(r.monotone && r.min_slack >= -1e-9);
        let tiny = transfer_map(&p, 2.0, 1e-7, &[5.0]).unwrap();
        assert!((tiny.points[0].f - 5.0).abs() < 1e-5);
        assert!(matches!(transfer_map(&p, 3.0, 2.0, &[28.0]), Err(HamiltonianError::OutOfRange { .. })));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = ProfileSpec::quadratic(6.0, 2.0).build().unwrap();
        assert_eq!(homotopy_action_derivative(&p, 2.0, 1.0, 0.5, 0.0).unwrap(), -0.0);
        let (k, lambda, s, t) = (2.0, 1.5, 0.4, 7.0);
        let d = homotopy_action_derivative(&p, k, lambda, s, t).unwrap();
        let e = 1e-5;
        let fd = (homotopy_action(&p, k, lambda, s + e, t).unwrap() - homotopy_action(&p, k, lambda, s - e, t).unwrap())
            / (2.0 * e);
        assert!((d - fd).abs() <= 1e-6 * d.abs(), "{d} vs {fd}");
        assert!(d >= -lambda * p.h(p.r_max()));
    }
}
