//! Reeb flows on ellipsoids `E(a_1, ..., a_n) = {Σ π|z_i|²/a_i = 1}`.
//!
//! With this normalization the simple closed orbits are the coordinate circles,
//! `γ_j` has period `T_j = π a_j`, and its linearized return map on the contact
//! plane rotates the `i`-th complex direction by `2π a_j / a_i`. As a Reeb
//! profile (dimension `n - 1`) this is a loop of index 2 from the orbit's own
//! plane plus elliptic blocks `ρ_i = a_j / a_i`, `i ≠ j`, so
//!
//! `μ(γ_j^k) = n - 1 + 2k + 2 Σ_{i≠j} ⌊k a_j / a_i⌋`, `μ̂(γ_j) = 2 Σ_i a_j / a_i`.
//!
//! Orbit ids are 0-based.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::{check_dynamical_convexity, ConvexityReport, IterationProfile, RotationNumber};
use crate::rational::{detect_rational, Detection, Ratio};

/// Recorded in serialized artifacts since the normalization is a choice.
pub const CONVENTION: &str = "E(a) = {sum_i pi|z_i|^2/a_i = 1}; T_j = pi*a_j; return-map angles 2*pi*a_j/a_i";

/// Guard band for comparing a slope against spectrum values.
pub const SPECTRUM_GUARD: f64 = 1e-9;

/// Iterates checked by [`pseudo_rotation_instance`].
pub const CONVEXITY_CHECK_K: u64 = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipsoidError {
    #[error("ellipsoid needs at least one weight")]
    Empty,
    #[error("weight {0} is not a positive finite number")]
    BadWeight(f64),
    #[error("ratio a_{j}/a_{i} = {ratio} is rational ({exact}); orbit iterates degenerate")]
    DegenerateEllipsoid { i: usize, j: usize, ratio: f64, exact: String },
    #[error("orbit {orbit} out of range for {n} weights")]
    NoSuchOrbit { orbit: usize, n: usize },
    #[error("ellipsoid failed the dynamical convexity check: {0:?}")]
    NotDynamicallyConvex(Box<ConvexityReport>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioFlag {
    pub i: usize,
    pub j: usize,
    /// `a_j / a_i`.
    pub ratio: f64,
    pub rational: Option<String>,
    /// The continued-fraction expansion reached the denominator cap.
    pub hit_cap: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    weights: Vec<f64>,
}

/// Sorted weights with their pairwise rationality flags.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EllipsoidSpec {
    weights: Vec<f64>,
    ratios: Vec<RatioFlag>,
}

impl EllipsoidSpec {
    pub fn new(mut weights: Vec<f64>) -> Result<Self, EllipsoidError> {
        if weights.is_empty() {
            return Err(EllipsoidError::Empty);
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(EllipsoidError::BadWeight(*w));
        }
        weights.sort_by(f64::total_cmp);
        let mut ratios = Vec::new();
        for i in 0..weights.len() {
            for j in i + 1..weights.len() {
                let ratio = weights[j] / weights[i];
                let (rational, hit_cap) = match detect_rational(ratio) {
                    Detection::Rational(r) => (Some(r.to_string()), false),
                    Detection::Irrational { hit_cap } => (None, hit_cap),
                };
                ratios.push(RatioFlag { i, j, ratio, rational, hit_cap });
            }
        }
        Ok(Self { weights, ratios })
    }

    /// Parses `{"weights": [...]}`.
    pub fn from_json(s: &str) -> Result<Self, String> {
        let raw: RawSpec = serde_json::from_str(s).map_err(|e| e.to_string())?;
        Self::new(raw.weights).map_err(|e| e.to_string())
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ratios(&self) -> &[RatioFlag] {
        &self.ratios
    }

    /// All pairwise ratios are irrational.
    pub fn is_irrational(&self) -> bool {
        self.ratios.iter().all(|r| r.rational.is_none())
    }

    /// Some ratio was only classified irrational because of the denominator cap.
    pub fn has_cap_warning(&self) -> bool {
        self.ratios.iter().any(|r| r.hit_cap)
    }

    fn first_rational(&self) -> Option<&RatioFlag> {
        self.ratios.iter().find(|r| r.rational.is_some())
    }

    fn check_orbit(&self, j: usize) -> Result<(), EllipsoidError> {
        if j >= self.n() {
            return Err(EllipsoidError::NoSuchOrbit { orbit: j, n: self.n() });
        }
        Ok(())
    }

    fn require_irrational(&self) -> Result<(), EllipsoidError> {
        match self.first_rational() {
            Some(r) => Err(EllipsoidError::DegenerateEllipsoid {
                i: r.i,
                j: r.j,
                ratio: r.ratio,
                exact: r.rational.clone().unwrap_or_default(),
            }),
            None => Ok(()),
        }
    }

    /// Iteration profile of the simple orbit `j`.
    ///
    /// Rejects ellipsoids with a rational ratio, whose orbits have degenerate iterates.
    pub fn profile(&self, j: usize) -> Result<IterationProfile, EllipsoidError> {
        self.check_orbit(j)?;
        self.require_irrational()?;
        Ok(self.profile_unchecked(j))
    }

    /// Profile of orbit `j` without the rationality check. Rational ratios
    /// are stored exactly so that degenerate iterates are detected exactly.
    pub fn profile_unchecked(&self, j: usize) -> IterationProfile {
        let elliptic = (0..self.n())
            .filter(|&i| i != j)
            .map(|i| {
                let ratio = self.weights[j] / self.weights[i];
                match detect_rational(ratio) {
                    Detection::Rational(r) => RotationNumber::Exact(r),
                    Detection::Irrational { .. } => RotationNumber::Real(ratio),
                }
            })
            .collect();
        IterationProfile { loop_index: 2, elliptic, hyperbolic: Vec::new(), degenerate: None }
    }

    /// `μ̂(γ_j) = 2 Σ_i a_j / a_i`.
    pub fn mean_index(&self, j: usize) -> f64 {
        2.0 * self.weights.iter().map(|a| self.weights[j] / a).sum::<f64>()
    }
}

/// `T_j = π a_j`.
pub fn ellipsoid_periods(spec: &EllipsoidSpec) -> Vec<f64> {
    spec.weights.iter().map(|a| PI * a).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub value: f64,
    pub orbit: usize,
    pub k: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionSpectrum {
    pub cutoff: f64,
    pub convention: &'static str,
    pub entries: Vec<SpectrumEntry>,
}

impl ActionSpectrum {
    /// `a` is not within the guard band of any listed value.
    pub fn slope_valid(&self, a: f64) -> bool {
        self.entries.iter().all(|e| (e.value - a).abs() > SPECTRUM_GUARD * a.abs().max(1.0))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["value", "j", "k"])?;
        for e in &self.entries {
            w.write_record([format!("{}", e.value), e.orbit.to_string(), e.k.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Values `k T_j <= cutoff`, ascending; values equal within the guard band are
/// ordered by `(j, k)`.
pub fn spectrum(spec: &EllipsoidSpec, cutoff: f64) -> ActionSpectrum {
    let mut entries = Vec::new();
    for (orbit, t) in ellipsoid_periods(spec).into_iter().enumerate() {
        let mut k = 1u64;
        while k as f64 * t <= cutoff * (1.0 + SPECTRUM_GUARD) {
            entries.push(SpectrumEntry { value: k as f64 * t, orbit, k });
            k += 1;
        }
    }
    entries.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut start = 0;
    while start < entries.len() {
        let mut end = start + 1;
        while end < entries.len()
            && entries[end].value - entries[start].value <= SPECTRUM_GUARD * entries[start].value.max(1.0)
        {
            end += 1;
        }
        entries[start..end].sort_by_key(|e| (e.orbit, e.k));
        start = end;
    }
    ActionSpectrum { cutoff, convention: CONVENTION, entries }
}

/// Seed data for an orbit system built from an irrational ellipsoid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudoRotationSeed {
    pub n: usize,
    pub convention: &'static str,
    pub orbits: Vec<SeedOrbit>,
    pub convexity: ConvexityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedOrbit {
    pub period: f64,
    pub profile: IterationProfile,
    pub mean_index: f64,
    pub nondegenerate: bool,
}

/// The `n` simple orbits with profiles, periods and a dynamical convexity report.
pub fn pseudo_rotation_instance(spec: &EllipsoidSpec) -> Result<PseudoRotationSeed, EllipsoidError> {
    spec.require_irrational()?;
    let periods = ellipsoid_periods(spec);
    let orbits: Vec<SeedOrbit> = (0..spec.n())
        .map(|j| SeedOrbit {
            period: periods[j],
            profile: spec.profile_unchecked(j),
            mean_index: spec.mean_index(j),
            nondegenerate: true,
        })
        .collect();
    let listed: Vec<_> = orbits.iter().map(|o| (o.profile.clone(), CONVEXITY_CHECK_K)).collect();
    let convexity = check_dynamical_convexity(&listed, spec.n());
    if !convexity.ok {
        return Err(EllipsoidError::NotDynamicallyConvex(Box::new(convexity)));
    }
    Ok(PseudoRotationSeed { n: spec.n(), convention: CONVENTION, orbits, convexity })
}

/// Convexity report over the first `k_max` iterates of every simple orbit.
pub fn convexity_report(spec: &EllipsoidSpec, k_max: u64) -> ConvexityReport {
    let listed: Vec<_> = (0..spec.n()).map(|j| (spec.profile_unchecked(j), k_max)).collect();
    check_dynamical_convexity(&listed, spec.n())
}

/// Exact rational for a weight ratio, if any.
pub fn exact_ratio(spec: &EllipsoidSpec, i: usize, j: usize) -> Option<Ratio> {
    match detect_rational(spec.weights[j] / spec.weights[i]) {
        Detection::Rational(r) => Some(r),
        Detection::Irrational { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::index_triple;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    #[test]
    fn periods_follow_convention() {
        let p = ellipsoid_periods(&EllipsoidSpec::new(vec![2.0, 1.0]).unwrap());
        assert_eq!(p, vec![PI, 2.0 * PI]);
        let p = ellipsoid_periods(&EllipsoidSpec::new(vec![1.0, 2f64.sqrt()]).unwrap());
        assert!((p[1] - 2f64.sqrt() * PI).abs() < 1e-15);
    }

    #[test]
    fn golden_ellipsoid_indices() {
        let spec = EllipsoidSpec::new(vec![1.0, GOLDEN]).unwrap();
        assert!(spec.is_irrational());
        assert_eq!(index_triple(&spec.profile(0).unwrap(), 1).mu_minus, 3);
        assert_eq!(index_triple(&spec.profile(1).unwrap(), 1).mu_minus, 5);
    }

    #[test]
    fn disk_iterates() {
        let spec = EllipsoidSpec::new(vec![1.0]).unwrap();
        let t = index_triple(&spec.profile(0).unwrap(), 5);
        assert_eq!((t.mu_minus, t.mu_plus), (10, 10));
    }

    #[test]
    fn rational_ratio_is_degenerate() {
        let spec = EllipsoidSpec::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(spec.profile(0), Err(EllipsoidError::DegenerateEllipsoid { .. })));
        assert!(matches!(pseudo_rotation_instance(&spec), Err(EllipsoidError::DegenerateEllipsoid { .. })));
    }

    #[test]
    fn spectrum_of_e12() {
        let s = spectrum(&EllipsoidSpec::new(vec![1.0, 2.0]).unwrap(), 7.0 * PI);
        let values: Vec<f64> = s.entries.iter().map(|e| (e.value / PI * 1e9).round() / 1e9).collect();
        assert_eq!(values, vec![1.0, 2.0, 2.0, 3.0, 4.0, 4.0, 5.0, 6.0, 6.0, 7.0]);
        assert_eq!((s.entries[1].orbit, s.entries[1].k), (0, 2));
        assert_eq!((s.entries[2].orbit, s.entries[2].k), (1, 1));
        assert!(!s.slope_valid(2.0 * PI));
        assert!(s.slope_valid(2.5 * PI));
    }

    #[test]
    fn spectrum_edge_cases() {
        let spec = EllipsoidSpec::new(vec![1.0, 1.0]).unwrap();
        assert!(spectrum(&spec, 3.0).entries.is_empty());
        assert_eq!(spectrum(&spec, 4.0 * PI).entries.len(), 8);
    }

    #[test]
    fn pseudo_rotation_instances() {
        let seed = pseudo_rotation_instance(&EllipsoidSpec::new(vec![1.0, 2f64.sqrt()]).unwrap()).unwrap();
        assert_eq!(seed.orbits.len(), 2);
        assert_eq!(seed.convexity.min_mu_minus, Some(3));
        let seed = pseudo_rotation_instance(&EllipsoidSpec::new(vec![1.0, GOLDEN, GOLDEN * GOLDEN]).unwrap()).unwrap();
        assert_eq!(seed.convexity.min_mu_minus, Some(4));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn json_spec() {
        let s = EllipsoidSpec::from_json(r#"{"weights": [1.41421356, 1]}"#).unwrap();
        assert_eq!(s.weights(), &[1.0, 1.41421356]);
        assert!(s.is_irrational());
        assert!(EllipsoidSpec::from_json(r#"{"weights": [1], "extra": 1}"#).is_err());
    }
}
