//! Evaluators for the energy and location bounds on Floer cylinders.
//!
//! These only evaluate the stated inequalities on given data; the constants
//! `ε` and `C'` of the small-energy estimate are inputs.

use serde::{Deserialize, Serialize};

use super::{HamiltonianError, HamiltonianProfile, DEFAULT_GRID};

/// Constants of the small-energy estimate `sup |∂_s u| <= C' E^{1/4}` for `E <= ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SalamonConstants {
    pub epsilon: f64,
    pub c_prime: f64,
}

impl Default for SalamonConstants {
    fn default() -> Self {
        Self { epsilon: 1.0, c_prime: 1.0 }
    }
}

impl SalamonConstants {
    /// `C = sqrt(4 C')`.
    pub fn location_constant(&self) -> f64 {
        (4.0 * self.c_prime).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Claim1Report {
    pub holds: bool,
    /// Smallest increment of `A_h(r)/r` between grid neighbours.
    pub min_increment: f64,
    pub r0: f64,
    pub grid: usize,
}

/// Checks that `A_h(r)/r` is nondecreasing on `[1, r0]`, which requires
/// `h''' >= 0` to be certified there.
pub fn claim1_check(profile: &HamiltonianProfile, r0: f64) -> Result<Claim1Report, HamiltonianError> {
    let certified = profile.h_triple_nonneg_up_to();
    if !(r0 > 1.0) || certified.is_none_or(|c| r0 > c + 1e-12) {
        return Err(HamiltonianError::UncertifiedRegion { certified, requested: r0 });
    }
    let grid = DEFAULT_GRID;
    let mut prev = profile.action_a(1.0);
    let mut min_increment = f64::INFINITY;
    for i in 1..=grid {
        let r = 1.0 + (r0 - 1.0) * i as f64 / grid as f64;
        let v = profile.action_a(r) / r;
        min_increment = min_increment.min(v - prev);
        prev = v;
    }
    let holds = min_increment >= -1e-12 * profile.intercept().max(1.0);
    Ok(Claim1Report { holds, min_increment, r0, grid })
}

/// Curried lower bound `r⁻ ↦ r⁻ - defect` on `inf r(u)` for a cylinder of energy
/// `E` whose upper end sits at `r⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocationBound {
    pub r_plus: f64,
    pub energy: f64,
    /// `C (r⁺)^{3/4} E^{5/8} / sqrt(A_h(r⁺))`.
    pub defect: f64,
}

impl LocationBound {
    pub fn lower_bound(&self, r_minus: f64) -> f64 {
        r_minus - self.defect
    }
}

pub fn location_bound(
    profile: &HamiltonianProfile,
    r_plus: f64,
    energy: f64,
    constants: SalamonConstants,
) -> Result<LocationBound, HamiltonianError> {
    if !(energy >= 0.0) {
        return Err(HamiltonianError::InvalidParameter(format!("energy {energy} must be nonnegative")));
    }
    if energy > constants.epsilon {
        return Err(HamiltonianError::EnergyAboveThreshold { energy, epsilon: constants.epsilon });
    }
    if !(r_plus > 1.0 && r_plus <= profile.r_max()) {
        return Err(HamiltonianError::BadGeometry(format!("r_plus = {r_plus} outside (1, {}]", profile.r_max())));
    }
    let action = profile.action_a(r_plus);
    if action <= 0.0 {
        return Err(HamiltonianError::BadGeometry(format!("A_h(r_plus) = {action} is not positive")));
    }
    let defect = constants.location_constant() * r_plus.powf(0.75) * energy.powf(0.625) / action.sqrt();
    Ok(LocationBound { r_plus, energy, defect })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingEnergyInputs {
    pub r_star: f64,
    pub delta: f64,
    pub eta: f64,
    pub tau0: f64,
    /// Growth constant of the Gronwall estimate.
    pub c: f64,
    pub c_prime: f64,
}

/// `[η h'(r* - δ) e^{-C τ0} / C']^4`.
pub fn crossing_energy_floor(profile: &HamiltonianProfile, inputs: CrossingEnergyInputs) -> Result<f64, HamiltonianError> {
    let CrossingEnergyInputs { r_star, delta, eta, tau0, c, c_prime } = inputs;
    if !(r_star - delta > 1.0) {
        return Err(HamiltonianError::BadGeometry(format!("r_star - delta = {} <= 1", r_star - delta)));
    }
    if !(eta > 0.0 && delta > 0.0 && tau0 >= 0.0 && c > 0.0 && c_prime > 0.0) {
        return Err(HamiltonianError::InvalidParameter("crossing-energy constants must be positive".into()));
    }
    Ok((eta * profile.dh(r_star - delta) * (-c * tau0).exp() / c_prime).powi(4))
}
