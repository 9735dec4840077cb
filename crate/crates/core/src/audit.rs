//! Arrow-exclusion bookkeeping for a finite system of closed Reeb orbits.
//!
//! Given orbits `x_0 = z, x_1, ..., x_q` with periods and iteration profiles,
//! a radial Hamiltonian `H` and recurrence data `(d, k_0, ..., k_q)`, every
//! orbit `x_i^j` of `kH` (with `k = k_0`) gets a certificate that it is not
//! joined to the distinguished generator(s) of `z^k` by a short arrow:
//!
//! * `SamePair`: the two generators of `z^k` themselves,
//! * `IndexGap`: the local homology support is at least two degrees away,
//! * `ShortActionGap`: the action difference is below the crossing energy `σ`,
//! * `DivergingActionGap`: the action difference has a lower bound growing
//!   linearly in `j`.
//!
//! All quantities are in the units of the input; the normalization `T_0 = μ̂(z)`
//! is reported as a factor rather than applied to the data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::{HamiltonianError, HamiltonianProfile, ProfileSpec, DEFAULT_GRID};
use crate::index::{support_interval, IterationProfile};
use crate::rational::{detect_rational, Detection, Ratio};
use crate::recurrence::{recurrence_search, RecurrenceError, RecurrenceQuery, RecurrenceSolution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuditError {
    #[error("invalid orbit system: {0}")]
    InvalidSystem(String),
    #[error("no ξ > 0 brackets the levels: margin {margin:.3e}")]
    XiNotFound { margin: f64 },
    #[error("C η = {product:.6} is not below σ = {sigma}")]
    ConstantViolation { product: f64, sigma: f64 },
    #[error("mode hypothesis fails: {0}")]
    ModeHypothesis(String),
    #[error("orbit {i}: j = {j} outside [1, {max}]")]
    JOutOfRange { i: usize, j: u64, max: u64 },
    #[error("pair not excluded: {0}")]
    NotExcluded(Box<NotExcluded>),
    #[error("audit failed at solution {}: {}", .0.failure.as_ref().map_or(0, |f| f.s), .0.failure.as_ref().map_or(String::new(), |f| f.reason.clone()))]
    AuditFailed(Box<AuditReport>),
    #[error("the recurrence search found no solution below k = {k_bound}")]
    NoSolutions { k_bound: u64 },
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSpec {
    pub period: f64,
    pub profile: IterationProfile,
    #[serde(default)]
    pub hyperbolic: bool,
    #[serde(default)]
    pub locally_maximal: bool,
}

/// Serialized orbit system. Orbit 0 is the distinguished orbit `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSystemSpec {
    /// Half the dimension of the symplectization; orbits live in dimension `2n - 1`.
    pub n: usize,
    pub orbits: Vec<OrbitSpec>,
    pub hamiltonian: ProfileSpec,
    /// Crossing-energy floor.
    pub sigma: f64,
    pub eta: f64,
    pub ell0: u64,
    /// Bar-length constant of the vanishing theorem.
    pub c_bar: f64,
    /// Filtration level `b` with `A_h(r_*) < b < a`; defaults to the midpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

impl OrbitSystemSpec {
    /// Orbits of a pseudo-rotation seed, reordered so that `locally_maximal`
    /// comes first and is flagged.
    pub fn from_seed(
        seed: &crate::ellipsoid::PseudoRotationSeed,
        locally_maximal: usize,
        hamiltonian: ProfileSpec,
        sigma: f64,
        eta: f64,
        c_bar: f64,
    ) -> Self {
        let mut orbits: Vec<OrbitSpec> = seed
            .orbits
            .iter()
            .map(|o| OrbitSpec { period: o.period, profile: o.profile.clone(), hyperbolic: false, locally_maximal: false })
            .collect();
        let z = orbits.remove(locally_maximal);
        orbits.insert(0, OrbitSpec { locally_maximal: true, ..z });
        Self { n: seed.n, orbits, hamiltonian, sigma, eta, ell0: seed.n as u64 + 1, c_bar, b: None }
    }

    pub fn from_json(s: &str) -> Result<Self, AuditError> {
        serde_json::from_str(s).map_err(|e| AuditError::InvalidSystem(e.to_string()))
    }
}

/// Constants of the action estimates, evaluated on a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedConstants {
    /// `r_*` with `h'(r_*) = T_0`.
    pub r_star: f64,
    /// `C_1 = 2 d(h')^{-1}/dτ (T_0) = 2 / h''(r_*)`.
    pub big_c1: f64,
    /// `C_2 = max_{[1, r_max]} r h''(r)`.
    pub big_c2: f64,
    /// `c_1 = min_{[0, a]} d(h')^{-1}/dτ = 1 / max h''`.
    pub c1: f64,
    /// `c_2 = min_Γ r h''(r)` with `Γ = [1 + ξ, r_max - ξ]`.
    pub c2: f64,
    pub xi: f64,
    pub gamma: [f64; 2],
    /// `C = C_1 C_2 T_0 / μ̂(z)`.
    pub big_c: f64,
    /// `μ̂(z) / T_0`, the factor that rescales periods to `T_0 = μ̂(z)`.
    pub normalization: f64,
    pub grid: usize,
}

/// Evaluates `C_1, C_2, c_1, c_2, ξ` for `H` and the orbit data (orbit 0 is `z`).
pub fn derive_constants(
    h: &HamiltonianProfile,
    orbits: &[OrbitSpec],
    grid: usize,
) -> Result<DerivedConstants, AuditError> {
    let z = orbits.first().ok_or_else(|| AuditError::InvalidSystem("no orbits".into()))?;
    let (t0, mu_z) = (z.period, z.profile.mean_index());
    let a = h.slope();
    let r_max = h.r_max();
    let inside = |t: f64| t > 0.0 && t < a;
    let mut targets = vec![t0];
    targets.extend(orbits.iter().skip(1).map(|x| mu_z * x.period / x.profile.mean_index()));
    let mut margin = f64::INFINITY;
    for &t in &targets {
        if !inside(t) {
            return Err(AuditError::XiNotFound { margin: (a - t).min(t) });
        }
        let r = h.level_for_period(t)?;
        margin = margin.min(r - 1.0).min(r_max - r);
    }
    if !(margin > 0.0) {
        return Err(AuditError::XiNotFound { margin });
    }
    let xi = margin / 2.0;
    let r_star = h.level_for_period(t0)?;
    let grid = grid.max(2);
    let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / grid as f64;
    let (mut big_c2, mut max_d2) = (0.0f64, 0.0f64);
    for i in 0..=grid {
        let r = at(1.0, r_max, i).clamp(1.0 + 1e-15, r_max - 1e-15);
        let d2 = h.d2h(r);
        big_c2 = big_c2.max(r * d2);
        max_d2 = max_d2.max(d2);
    }
    let gamma = [1.0 + xi, r_max - xi];
    let c2 = (0..=grid).map(|i| at(gamma[0], gamma[1], i)).map(|r| r * h.d2h(r)).fold(f64::INFINITY, f64::min);
    let big_c1 = 2.0 / h.d2h(r_star);
    let c1 = 1.0 / max_d2;
    if !(c1 > 0.0 && c2 > 0.0 && big_c1.is_finite()) {
        return Err(AuditError::InvalidSystem(format!("degenerate constants c1 = {c1}, c2 = {c2}, C1 = {big_c1}")));
    }
    Ok(DerivedConstants {
        r_star,
        big_c1,
        big_c2,
        c1,
        c2,
        xi,
        gamma,
        big_c: big_c1 * big_c2 * t0 / mu_z,
        normalization: mu_z / t0,
        grid,
    })
}

/// A validated orbit system with its Hamiltonian and constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitSystem {
    pub spec: OrbitSystemSpec,
    #[serde(skip)]
    pub hamiltonian: HamiltonianProfile,
    pub constants: DerivedConstants,
    /// The filtration level actually used.
    pub b: f64,
}

impl OrbitSystem {
    pub fn new(spec: OrbitSystemSpec) -> Result<Self, AuditError> {
        let bad = |m: String| Err(AuditError::InvalidSystem(m));
        if spec.n < 2 {
            return bad(format!("n = {} must be at least 2", spec.n));
        }
        if spec.orbits.is_empty() {
            return bad("no orbits".into());
        }
        for (i, x) in spec.orbits.iter().enumerate() {
            x.profile.validate().map_err(|e| AuditError::InvalidSystem(format!("orbit {i}: {e}")))?;
            if x.profile.dim_half() != spec.n - 1 {
                return bad(format!("orbit {i}: profile has dimension {}, expected {}", x.profile.dim_half(), spec.n - 1));
            }
            if !(x.period.is_finite() && x.period > 0.0) {
                return bad(format!("orbit {i}: period {} must be positive", x.period));
            }
            if !(x.profile.mean_index() > 0.0) {
                return bad(format!("orbit {i}: mean index {} must be positive", x.profile.mean_index()));
            }
        }
        if !(spec.eta > 0.0 && spec.eta < 0.5) {
            return bad(format!("η = {} must lie in (0, 1/2)", spec.eta));
        }
        if !(spec.sigma > 0.0 && spec.c_bar > 0.0 && spec.ell0 >= 1) {
            return bad("σ, C̄ and ℓ0 must be positive".into());
        }
        let hamiltonian = spec.hamiltonian.build()?;
        let a = hamiltonian.slope();
        let t_max = spec.orbits.iter().map(|x| x.period).fold(0.0, f64::max);
        if !(a > t_max) {
            return bad(format!("slope {a} must exceed every period (max {t_max})"));
        }
        let constants = derive_constants(&hamiltonian, &spec.orbits, DEFAULT_GRID)?;
        let product = constants.big_c * spec.eta;
        if !(product < spec.sigma) {
            return Err(AuditError::ConstantViolation { product, sigma: spec.sigma });
        }
        let a_star = hamiltonian.action_a(constants.r_star);
        let b = match spec.b {
            Some(b) => b,
            None if a_star < a => 0.5 * (a_star + a),
            None => return bad(format!("no room for b: A_h(r_*) = {a_star} >= a = {a}")),
        };
        if !(b > a_star && b < a) {
            return bad(format!("b = {b} must lie in (A_h(r_*), a) = ({a_star}, {a})"));
        }
        Ok(Self { spec, hamiltonian, constants, b })
    }

    pub fn orbits(&self) -> &[OrbitSpec] {
        &self.spec.orbits
    }

    pub fn profiles(&self) -> Vec<IterationProfile> {
        self.spec.orbits.iter().map(|x| x.profile.clone()).collect()
    }

    /// Largest `j` with `j T_i <= k a`.
    pub fn j_max(&self, i: usize, k: u64) -> u64 {
        (k as f64 * self.hamiltonian.slope() / self.spec.orbits[i].period).floor() as u64
    }

    /// `𝒜_{kH}` of the orbit `x_i^j`, at the level `k h'(r) = j T_i`.
    pub fn action(&self, i: usize, j: u64, k: u64) -> Result<f64, AuditError> {
        let t = j as f64 * self.spec.orbits[i].period / k as f64;
        let r = self.hamiltonian.level_for_period(t.min(self.hamiltonian.slope()))?;
        Ok(k as f64 * self.hamiltonian.action_a(r))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Resonance {
    Resonant { relative_difference: f64 },
    /// `δ = |T_i - μ̂(x_i) T_0 / μ̂(z)|` in input units and after normalization.
    Nonresonant { delta: f64, delta_normalized: f64 },
}

/// Compares `T_i / μ̂(x_i)` with `T_0 / μ̂(z)` under the rational-detection tolerance.
pub fn resonance_classify(system: &OrbitSystem, i: usize) -> Result<Resonance, AuditError> {
    if i == 0 || i >= system.orbits().len() {
        return Err(AuditError::InvalidSystem(format!("resonance needs a companion orbit, got i = {i}")));
    }
    let (z, x) = (&system.orbits()[0], &system.orbits()[i]);
    let (mu_z, mu_x) = (z.profile.mean_index(), x.profile.mean_index());
    let q = (x.period * mu_z) / (mu_x * z.period);
    if matches!(detect_rational(q), Detection::Rational(r) if r == Ratio::integer(1)) {
        return Ok(Resonance::Resonant { relative_difference: (q - 1.0).abs() });
    }
    let delta = (x.period - mu_x * z.period / mu_z).abs();
    Ok(Resonance::Nonresonant { delta, delta_normalized: delta * system.constants.normalization })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// `i = 0`.
    Case0,
    /// `i >= 1`, `j = k_i`.
    Case1,
    /// `i >= 1`, `|j - k_i| > ℓ0`.
    Case2,
    /// `i >= 1`, `0 < |j - k_i| <= ℓ0`.
    Case3,
}

pub fn case_classify(system: &OrbitSystem, solution: &RecurrenceSolution, i: usize, j: u64) -> Result<Case, AuditError> {
    if solution.k.len() != system.orbits().len() || i >= system.orbits().len() {
        return Err(AuditError::InvalidSystem("solution does not match the orbit system".into()));
    }
    let max = system.j_max(i, solution.k[0]);
    if j < 1 || j > max {
        return Err(AuditError::JOutOfRange { i, j, max });
    }
    if i == 0 {
        return Ok(Case::Case0);
    }
    let ell = j.abs_diff(solution.k[i]);
    Ok(match ell {
        0 => Case::Case1,
        l if l > system.spec.ell0 => Case::Case2,
        _ => Case::Case3,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AuditMode {
    /// Hyperbolic `z`, the upper generator `ẑ^k` is protected.
    #[serde(alias = "theorem_a", alias = "A")]
    TheoremA,
    /// As `TheoremA` with the lower generator `ž^k` protected in Case 3.
    #[serde(alias = "theorem_a_alt")]
    TheoremAAlt,
    /// Locally maximal non-degenerate `z`; the protected generator depends on
    /// the sign of `d - μ̂(z^k)`.
    #[serde(alias = "theorem_b", alias = "B")]
    TheoremB,
}

impl std::str::FromStr for AuditMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown mode {s:?}; expected theoremA, theoremAAlt or theoremB"))
    }
}

/// Which Floer generator of `z^k`: `ž` in degree `μ(z^k)` or `ẑ` one above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZGenerator {
    Check,
    Hat,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason")]
pub enum Exclusion {
    SamePair,
    IndexGap {
        generator: ZGenerator,
        degrees: Vec<i64>,
        support: [i64; 2],
        gap: i64,
        /// `ℓ μ̂(x) - n` for Case 2.
        #[serde(skip_serializing_if = "Option::is_none")]
        mean_index_bound: Option<f64>,
    },
    ShortActionGap {
        /// `C_1 C_2 |k T_0 - j T|`.
        bound: f64,
        /// `2 C η`: IR1 bounds `|k μ̂(z) - j μ̂(x)|` by `2η`.
        ceiling: f64,
        /// `C η`, the ceiling with `|k μ̂(z) - j μ̂(x)| <= η`.
        eta_ceiling: f64,
        direct_gap: f64,
        sigma: f64,
    },
    DivergingActionGap {
        /// `c_1 c_2 (δ j - 2η T_0 / μ̂(z))`.
        lower_bound: f64,
        /// `c_1 c_2 (δ j - η T_0 / μ̂(z))`.
        eta_lower_bound: f64,
        direct_gap: f64,
        delta: f64,
        /// Both levels lie in `Γ`.
        within_gamma: bool,
        /// Smallest `j` with `lower_bound > 3 C̄`.
        effective_from_j: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCertificate {
    pub i: usize,
    pub j: u64,
    pub case: Case,
    #[serde(flatten)]
    pub exclusion: Exclusion,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NotExcluded {
    pub s: usize,
    pub d: i64,
    pub k: Vec<u64>,
    pub i: usize,
    pub j: u64,
    pub case: Case,
    pub reason: String,
}

impl std::fmt::Display for NotExcluded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "s = {}, d = {}, (i, j) = ({}, {}), {:?}: {}", self.s, self.d, self.i, self.j, self.case, self.reason)
    }
}

fn distance(g: i64, [lo, hi]: [i64; 2]) -> i64 {
    if g < lo {
        lo - g
    } else if g > hi {
        g - hi
    } else {
        0
    }
}

/// Degrees of `ž^k` and `ẑ^k`.
fn z_degrees(system: &OrbitSystem, k: u64) -> Result<(i64, i64), String> {
    let t = system.orbits()[0].profile.iterate(k).triple;
    t.mu().map(|m| (m, m + 1)).ok_or_else(|| format!("z^{k} is degenerate"))
}

fn protected_generator(system: &OrbitSystem, solution: &RecurrenceSolution, mode: AuditMode) -> ZGenerator {
    match mode {
        AuditMode::TheoremA => ZGenerator::Hat,
        AuditMode::TheoremAAlt => ZGenerator::Check,
        AuditMode::TheoremB => {
            let mu_hat = system.orbits()[0].profile.mean_index() * solution.k[0] as f64;
            if (solution.d as f64) < mu_hat {
                ZGenerator::Check
            } else {
                ZGenerator::Hat
            }
        }
    }
}

fn fail(solution: &RecurrenceSolution, i: usize, j: u64, case: Case, reason: String) -> AuditError {
    AuditError::NotExcluded(Box::new(NotExcluded { s: 0, d: solution.d, k: solution.k.clone(), i, j, case, reason }))
}

/// Certifies that `x_i^j` is not joined to the protected generator of `z^k`
/// by a short arrow, or fails with the full numeric context.
pub fn exclusion_certificate(
    system: &OrbitSystem,
    solution: &RecurrenceSolution,
    i: usize,
    j: u64,
    mode: AuditMode,
) -> Result<PairCertificate, AuditError> {
    let case = case_classify(system, solution, i, j)?;
    let k = solution.k[0];
    let n = system.spec.n;
    let cert = |exclusion| Ok(PairCertificate { i, j, case, exclusion });
    if i == 0 && j == k {
        return cert(Exclusion::SamePair);
    }
    let (check, hat) = z_degrees(system, k).map_err(|e| fail(solution, i, j, case, e))?;
    let index_gap = |generator: ZGenerator, mean_index_bound: Option<f64>| -> Result<PairCertificate, AuditError> {
        let x = &system.orbits()[i];
        let (lo, hi) = support_interval(&x.profile, j, n).map_err(|e| fail(solution, i, j, case, e.to_string()))?;
        let support = [lo, hi];
        let degrees = match generator {
            ZGenerator::Check => vec![check],
            ZGenerator::Hat => vec![hat],
            ZGenerator::Both => vec![check, hat],
        };
        let gap = degrees.iter().map(|g| distance(*g, support)).min().unwrap_or(0);
        if gap < 2 {
            return Err(fail(
                solution,
                i,
                j,
                case,
                format!("index gap {gap} < 2: degrees {degrees:?} against support [{lo}, {hi}]"),
            ));
        }
        cert(Exclusion::IndexGap { generator, degrees, support, gap, mean_index_bound })
    };
    let ell = j.abs_diff(solution.k[i]);
    let protected = protected_generator(system, solution, mode);
    match (case, mode) {
        (Case::Case0, AuditMode::TheoremA | AuditMode::TheoremAAlt) => index_gap(ZGenerator::Both, None),
        (Case::Case0, AuditMode::TheoremB) if ell > system.spec.ell0 => index_gap(ZGenerator::Both, None),
        (Case::Case0, AuditMode::TheoremB) => index_gap(protected, None),
        (Case::Case2, _) => {
            let bound = ell as f64 * system.orbits()[i].profile.mean_index() - n as f64;
            index_gap(ZGenerator::Both, Some(bound))
        }
        (Case::Case3, _) => index_gap(protected, None),
        (Case::Case1, _) => action_certificate(system, solution, i, j).map(|exclusion| PairCertificate {
            i,
            j,
            case,
            exclusion,
        }),
    }
}

fn action_certificate(
    system: &OrbitSystem,
    solution: &RecurrenceSolution,
    i: usize,
    j: u64,
) -> Result<Exclusion, AuditError> {
    let k = solution.k[0];
    let c = &system.constants;
    let (t0, t) = (system.orbits()[0].period, system.orbits()[i].period);
    let direct_gap = (system.action(i, j, k)? - system.action(0, k, k)?).abs();
    let spread = (k as f64 * t0 - j as f64 * t).abs();
    let slack = 1e-9 * system.action(0, k, k)?.abs().max(1.0);
    let failure = |reason: String| fail(solution, i, j, Case::Case1, reason);
    match resonance_classify(system, i)? {
        Resonance::Resonant { .. } => {
            let bound = c.big_c1 * c.big_c2 * spread;
            let eta_ceiling = c.big_c * system.spec.eta;
            let ceiling = 2.0 * eta_ceiling;
            let sigma = system.spec.sigma;
            if direct_gap > bound + slack {
                return Err(failure(format!("action gap {direct_gap} exceeds C1 C2 |kT0 - jT| = {bound}")));
            }
            if !(bound <= ceiling + slack && bound < sigma) {
                return Err(failure(format!("resonant bound {bound} is not below σ = {sigma} (2Cη = {ceiling})")));
            }
            Ok(Exclusion::ShortActionGap { bound, ceiling, eta_ceiling, direct_gap, sigma })
        }
        Resonance::Nonresonant { delta, .. } => {
            let c12 = c.c1 * c.c2;
            let eta_raw = system.spec.eta / c.normalization;
            let lower_bound = c12 * (delta * j as f64 - 2.0 * eta_raw);
            let eta_lower_bound = c12 * (delta * j as f64 - eta_raw);
            if !(lower_bound > 0.0) {
                return Err(failure(format!("diverging bound {lower_bound} is not positive")));
            }
            if direct_gap < lower_bound - slack {
                return Err(failure(format!("action gap {direct_gap} is below the bound {lower_bound}")));
            }
            let r_hi = system.hamiltonian.level_for_period(j as f64 * t / k as f64)?;
            let within_gamma = [c.r_star, r_hi].iter().all(|r| *r >= c.gamma[0] && *r <= c.gamma[1]);
            let effective_from_j = ((3.0 * system.spec.c_bar / c12 + 2.0 * eta_raw) / delta).floor() as u64 + 1;
            Ok(Exclusion::DivergingActionGap { lower_bound, eta_lower_bound, direct_gap, delta, within_gamma, effective_from_j })
        }
    }
}

/// The final step: `I = [A - 2C̄, A + 2C̄]` around `A = 𝒜_{kH}(z̃^k)` must sit below `k b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContradictionStep {
    pub action: f64,
    pub interval: [f64; 2],
    pub kb: f64,
    pub contained: bool,
    /// Smallest `k` with `A + 2C̄ <= k b`.
    pub k_min: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ReasonCounts {
    pub same_pair: usize,
    pub index_gap: usize,
    pub short_action_gap: usize,
    pub diverging_action_gap: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionAudit {
    pub s: usize,
    pub d: i64,
    pub k: Vec<u64>,
    pub protected: ZGenerator,
    /// `μ̂(z^k) - d`.
    pub mean_index_offset: f64,
    pub counts: ReasonCounts,
    /// Smallest `DivergingActionGap` lower bound.
    pub min_diverging_bound: Option<f64>,
    /// Every `DivergingActionGap` has `j >= effective_from_j`.
    pub diverging_effective: bool,
    pub contradiction: ContradictionStep,
    pub certificates: Vec<PairCertificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub mode: AuditMode,
    pub n: usize,
    pub constants: DerivedConstants,
    pub b: f64,
    pub resonance: Vec<Resonance>,
    pub solutions: Vec<SolutionAudit>,
    pub horizon_exhausted: bool,
    /// Minimum diverging bounds strictly increase along the solutions.
    pub diverging_trend_increasing: bool,
    pub passed: bool,
    pub failure: Option<NotExcluded>,
}

impl AuditReport {
    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "mode {:?}: {} solution(s), {}\n",
            self.mode,
            self.solutions.len(),
            if self.passed { "PASS" } else { "FAIL" }
        );
        let c = &self.constants;
        out += &format!(
            "C1 = {:.6}, C2 = {:.6}, c1 = {:.6}, c2 = {:.6}, xi = {:.6}, C = {:.6}\n",
            c.big_c1, c.big_c2, c.c1, c.c2, c.xi, c.big_c
        );
        for s in &self.solutions {
            out += &format!(
                "s = {}: d = {}, k = {:?}, same {} / index {} / short {} / diverging {}, min diverging bound {}, I below kb: {}\n",
                s.s,
                s.d,
                s.k,
                s.counts.same_pair,
                s.counts.index_gap,
                s.counts.short_action_gap,
                s.counts.diverging_action_gap,
                s.min_diverging_bound.map_or("-".to_string(), |b| format!("{b:.6}")),
                s.contradiction.contained
            );
        }
        if let Some(f) = &self.failure {
            out += &format!("first failure: {f}\n");
        }
        out
    }
}

/// Recurrence-search parameters for [`audit`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchRange {
    pub count: usize,
    pub k_bound: u64,
    #[serde(default = "one")]
    pub divisor: u64,
}

fn one() -> u64 {
    1
}

impl Default for SearchRange {
    fn default() -> Self {
        Self { count: 3, k_bound: 1_000_000, divisor: 1 }
    }
}

fn check_mode(system: &OrbitSystem, mode: AuditMode) -> Result<(), AuditError> {
    let bad = |m: String| Err(AuditError::ModeHypothesis(m));
    let n = system.spec.n;
    let z = &system.orbits()[0];
    match mode {
        AuditMode::TheoremA | AuditMode::TheoremAAlt => {
            if !(z.hyperbolic && z.profile.elliptic.is_empty() && z.profile.degenerate.is_none()) {
                return bad("z must be hyperbolic".into());
            }
            let mu = z.profile.iterate(1).triple.mu_minus;
            if mu < 3 {
                return bad(format!("μ(z) = {mu} must be at least 3"));
            }
            let min_mu = system.orbits().iter().skip(1).map(|x| x.profile.mean_index()).fold(f64::INFINITY, f64::min);
            let need = (n as f64 + 3.0) / min_mu;
            if !(system.spec.ell0 as f64 > need) {
                return bad(format!("ℓ0 = {} must exceed (n + 3) / min μ̂ = {need:.6}", system.spec.ell0));
            }
        }
        AuditMode::TheoremB => {
            if !z.locally_maximal {
                return bad("z must be flagged locally maximal".into());
            }
            if system.spec.ell0 != n as u64 + 1 {
                return bad(format!("ℓ0 = {} must equal n + 1 = {}", system.spec.ell0, n + 1));
            }
            if let Some(i) = system.orbits().iter().position(|x| x.profile.degenerate.is_some()) {
                return bad(format!("orbit {i} has a degenerate factor"));
            }
        }
    }
    Ok(())
}

fn audit_solution(
    system: &OrbitSystem,
    solution: &RecurrenceSolution,
    s: usize,
    mode: AuditMode,
) -> Result<SolutionAudit, NotExcluded> {
    let k = solution.k[0];
    let pairs: Vec<(usize, u64)> =
        (0..system.orbits().len()).flat_map(|i| (1..=system.j_max(i, k)).map(move |j| (i, j))).collect();
    let results: Vec<Result<PairCertificate, AuditError>> =
        pairs.par_iter().map(|&(i, j)| exclusion_certificate(system, solution, i, j, mode)).collect();
    let mut certificates = Vec::with_capacity(results.len());
    let mut counts = ReasonCounts::default();
    let mut min_diverging_bound: Option<f64> = None;
    let mut diverging_effective = true;
    for (r, &(i, j)) in results.into_iter().zip(&pairs) {
        let c = match r {
            Ok(c) => c,
            Err(AuditError::NotExcluded(mut e)) => {
                e.s = s;
                return Err(*e);
            }
            Err(other) => {
                return Err(NotExcluded {
                    s,
                    d: solution.d,
                    k: solution.k.clone(),
                    i,
                    j,
                    case: case_classify(system, solution, i, j).unwrap_or(Case::Case0),
                    reason: other.to_string(),
                })
            }
        };
        match &c.exclusion {
            Exclusion::SamePair => counts.same_pair += 1,
            Exclusion::IndexGap { .. } => counts.index_gap += 1,
            Exclusion::ShortActionGap { .. } => counts.short_action_gap += 1,
            Exclusion::DivergingActionGap { lower_bound, effective_from_j, .. } => {
                counts.diverging_action_gap += 1;
                min_diverging_bound = Some(min_diverging_bound.map_or(*lower_bound, |m| m.min(*lower_bound)));
                diverging_effective &= c.j >= *effective_from_j;
            }
        }
        certificates.push(c);
    }
    let action = system.action(0, k, k).map_err(|e| NotExcluded {
        s,
        d: solution.d,
        k: solution.k.clone(),
        i: 0,
        j: k,
        case: Case::Case0,
        reason: e.to_string(),
    })?;
    let c_bar = system.spec.c_bar;
    let kb = k as f64 * system.b;
    let a_star = system.hamiltonian.action_a(system.constants.r_star);
    let contradiction = ContradictionStep {
        action,
        interval: [action - 2.0 * c_bar, action + 2.0 * c_bar],
        kb,
        contained: action + 2.0 * c_bar <= kb,
        k_min: (2.0 * c_bar / (system.b - a_star)).ceil().max(1.0) as u64,
    };
    Ok(SolutionAudit {
        s,
        d: solution.d,
        k: solution.k.clone(),
        protected: protected_generator(system, solution, mode),
        mean_index_offset: system.orbits()[0].profile.mean_index() * k as f64 - solution.d as f64,
        counts,
        min_diverging_bound,
        diverging_effective,
        contradiction,
        certificates,
    })
}

/// Runs the recurrence search and certifies every pair for each solution.
/// Fails with [`AuditError::AuditFailed`] carrying the partial report.
pub fn audit(system: &OrbitSystem, mode: AuditMode, range: SearchRange) -> Result<AuditReport, AuditError> {
    check_mode(system, mode)?;
    let query = RecurrenceQuery {
        profiles: system.profiles(),
        eta: system.spec.eta,
        ell0: system.spec.ell0,
        divisor: range.divisor,
        k_bound: range.k_bound,
        count: range.count,
    };
    let outcome = recurrence_search(&query)?;
    if outcome.solutions.is_empty() {
        return Err(AuditError::NoSolutions { k_bound: range.k_bound });
    }
    audit_solutions(system, mode, &outcome.solutions, outcome.horizon_exhausted)
}

/// Audits given recurrence solutions (each must verify for the system's profiles).
pub fn audit_solutions(
    system: &OrbitSystem,
    mode: AuditMode,
    solutions: &[RecurrenceSolution],
    horizon_exhausted: bool,
) -> Result<AuditReport, AuditError> {
    check_mode(system, mode)?;
    let profiles = system.profiles();
    for sol in solutions {
        let c = crate::recurrence::verify_ir(
            &profiles,
            sol.d,
            &sol.k,
            system.spec.eta,
            system.spec.ell0,
            sol.certificate.divisor,
        )?;
        if !c.pass {
            return Err(AuditError::InvalidSystem(format!("solution d = {} does not verify", sol.d)));
        }
    }
    let results: Vec<Result<SolutionAudit, NotExcluded>> =
        solutions.par_iter().enumerate().map(|(s, sol)| audit_solution(system, sol, s, mode)).collect();
    let mut audited = Vec::new();
    let mut failure = None;
    for r in results {
        match r {
            Ok(a) => audited.push(a),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let bounds: Vec<f64> = audited.iter().filter_map(|a| a.min_diverging_bound).collect();
    let diverging_trend_increasing = bounds.windows(2).all(|w| w[1] > w[0]);
    let resonance = (1..system.orbits().len()).map(|i| resonance_classify(system, i)).collect::<Result<_, _>>()?;
    let report = AuditReport {
        mode,
        n: system.spec.n,
        constants: system.constants.clone(),
        b: system.b,
        resonance,
        solutions: audited,
        horizon_exhausted,
        diverging_trend_increasing,
        passed: failure.is_none(),
        failure,
    };
    if report.passed {
        Ok(report)
    } else {
        Err(AuditError::AuditFailed(Box::new(report)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellipsoid::{ellipsoid_periods, pseudo_rotation_instance, EllipsoidSpec};

    fn flagship() -> OrbitSystemSpec {
        let e = EllipsoidSpec::new(vec![1.0, 2f64.sqrt()]).unwrap();
        let periods = ellipsoid_periods(&e);
        let mut orbits = vec![OrbitSpec {
            period: 3.0,
            profile: IterationProfile::hyperbolic(&[3]),
            hyperbolic: true,
            locally_maximal: false,
        }];
        for j in 0..2 {
            orbits.push(OrbitSpec {
                period: periods[j],
                profile: e.profile(j).unwrap(),
                hyperbolic: false,
                locally_maximal: false,
            });
        }
        OrbitSystemSpec {
            n: 2,
            orbits,
            hamiltonian: ProfileSpec::quadratic(6.0, 2.0),
            sigma: 0.5,
            eta: 0.1,
            ell0: 3,
            c_bar: 0.5,
            b: Some(5.0),
        }
    }

    #[test]
    fn constants_closed_form() {
        let sys = OrbitSystem::new(flagship()).unwrap();
        let c = &sys.constants;
        assert!((c.r_star - 1.5).abs() < 1e-12);
        assert!((c.big_c1 - 1.0 / 3.0).abs() < 1e-12);
        // quadratic family: C2 = r_max h''
        assert!((c.big_c2 - 12.0).abs() < 1e-9);
        assert!((c.c1 - 1.0 / 6.0).abs() < 1e-12);
        assert!((c.c2 - 6.0 * (1.0 + c.xi)).abs() < 1e-9);
        assert!((c.big_c - 4.0).abs() < 1e-9);
        let fine = derive_constants(&sys.hamiltonian, sys.orbits(), 4 * DEFAULT_GRID).unwrap();
        assert!((fine.c2 - c.c2).abs() < 1e-6 && (fine.big_c2 - c.big_c2).abs() < 1e-6);
    }

    #[test]
    fn constructor_rejections() {
        let mut s = flagship();
        s.eta = 0.2;
        assert!(matches!(OrbitSystem::new(s), Err(AuditError::ConstantViolation { .. })));
        let mut s = flagship();
        s.hamiltonian = ProfileSpec::quadratic(2.9, 2.0);
        s.orbits.truncate(1);
        s.orbits[0].period = 2.95;
        assert!(matches!(OrbitSystem::new(s), Err(AuditError::InvalidSystem(_))));
        let h = ProfileSpec::quadratic(2.5, 2.0).build().unwrap();
        let mut orbits = flagship().orbits;
        orbits[0].period = 1.0;
        assert!(matches!(derive_constants(&h, &orbits, 256), Err(AuditError::XiNotFound { .. })));
    }

    #[test]
    fn resonance() {
        let mut s = flagship();
        s.orbits.push(OrbitSpec {
            period: 4.0,
            profile: IterationProfile::hyperbolic(&[4]),
            hyperbolic: true,
            locally_maximal: false,
        });
        let sys = OrbitSystem::new(s).unwrap();
        assert!(matches!(resonance_classify(&sys, 3).unwrap(), Resonance::Resonant { .. }));
        match resonance_classify(&sys, 1).unwrap() {
            Resonance::Nonresonant { delta, .. } => {
                assert!((delta - (2.0 + 2f64.sqrt() - std::f64::consts::PI)).abs() < 1e-12)
            }
            r => panic!("{r:?}"),
        }
        assert!(resonance_classify(&sys, 0).is_err());
    }

    #[test]
    fn cases_and_certificates() {
        let sys = OrbitSystem::new(flagship()).unwrap();
        let q = RecurrenceQuery::new(sys.profiles(), 0.1, 3);
        let sol = &recurrence_search(&q).unwrap().solutions[0];
        let k = sol.k[0];
        assert_eq!(case_classify(&sys, sol, 0, 1).unwrap(), Case::Case0);
        assert_eq!(case_classify(&sys, sol, 1, sol.k[1]).unwrap(), Case::Case1);
        assert_eq!(case_classify(&sys, sol, 1, sol.k[1] + 4).unwrap(), Case::Case2);
        assert_eq!(case_classify(&sys, sol, 2, sol.k[2] - 2).unwrap(), Case::Case3);
        assert!(matches!(case_classify(&sys, sol, 0, 2 * k + 1), Err(AuditError::JOutOfRange { .. })));
        let c = exclusion_certificate(&sys, sol, 0, k + 1, AuditMode::TheoremA).unwrap();
        assert!(matches!(c.exclusion, Exclusion::IndexGap { gap, .. } if gap >= 2));
        let c = exclusion_certificate(&sys, sol, 1, sol.k[1], AuditMode::TheoremA).unwrap();
        assert!(matches!(c.exclusion, Exclusion::DivergingActionGap { .. }));
        assert_eq!(exclusion_certificate(&sys, sol, 0, k, AuditMode::TheoremA).unwrap().exclusion, Exclusion::SamePair);
    }

    #[test]
    fn flagship_passes() {
        let sys = OrbitSystem::new(flagship()).unwrap();
        let report = audit(&sys, AuditMode::TheoremA, SearchRange::default()).unwrap();
        assert_eq!(report.solutions.len(), 3);
        assert!(report.diverging_trend_increasing);
        for s in &report.solutions {
            let total = 1 + sys.j_max(0, s.k[0]) + sys.j_max(1, s.k[0]) + sys.j_max(2, s.k[0]);
            assert_eq!(s.certificates.len() as u64, total - 1);
            assert_eq!(s.counts.same_pair, 1);
        }
    }

    #[test]
    fn theorem_b_on_golden_ellipsoid() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let seed = pseudo_rotation_instance(&EllipsoidSpec::new(vec![1.0, phi]).unwrap()).unwrap();
        let spec = OrbitSystemSpec::from_seed(&seed, 0, ProfileSpec::quadratic(8.0, 2.0), 0.5, 0.05, 0.5);
        let sys = OrbitSystem::new(spec).unwrap();
        assert!(matches!(resonance_classify(&sys, 1).unwrap(), Resonance::Resonant { .. }));
        let report = audit(&sys, AuditMode::TheoremB, SearchRange::default()).unwrap();
        assert!(report.passed);
        for s in &report.solutions {
            let expected = if s.mean_index_offset > 0.0 { ZGenerator::Check } else { ZGenerator::Hat };
            assert_eq!(s.protected, expected);
            assert!(s.counts.short_action_gap >= 1);
        }
        assert!(matches!(audit(&sys, AuditMode::TheoremA, SearchRange::default()), Err(AuditError::ModeHypothesis(_))));
    }
}
