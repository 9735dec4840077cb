//! Exact iterate indices from a block profile.
//!
//! A profile is a loop factor with even Maslov contribution, a direct sum of
//! elliptic rotations `t ↦ R(2πρt)`, hyperbolic blocks with `μ(Φ^k) = k h`,
//! and a totally degenerate factor `exp(JQt)` described by its normal-form
//! counts. Per block, at iterate `k`:
//!
//! * elliptic `ρ`: `μ = 2⌊kρ⌋ + 1`; if `kρ ∈ Z` the iterate is degenerate and
//!   contributes `μ± = 2kρ ± 1` (a zero block),
//! * hyperbolic `h`: `μ = k h`,
//! * degenerate: `μ̂ = 0`, `μ+ = b0 + b_plus + nu0`, `μ- = -(b0 + b_minus + nu0)`,
//!   independent of `k` since `kQ` has the same normal form as `Q`,
//! * loop: `k · loop_index`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::IndexError;
use crate::rational::Ratio;
use crate::symplectic::WilliamsonInvariants;

/// Distance from an integer below which `kρ` counts as an integer.
pub const INTEGER_GUARD: f64 = 1e-9;

/// Rotation number in full turns, exact when supplied as `"p/q"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RotationNumber {
    Exact(Ratio),
    Real(f64),
}

impl RotationNumber {
    pub fn value(&self) -> f64 {
        match self {
            RotationNumber::Exact(r) => r.to_f64(),
            RotationNumber::Real(x) => *x,
        }
    }

    /// `(⌊kρ⌋, kρ ∈ Z)`, exact for rationals and guard-banded for floats.
    /// When `kρ` is within the guard band of an integer `n`, returns `(n, true)`.
    pub fn scaled_floor(&self, k: u64) -> (i64, bool) {
        match self {
            RotationNumber::Exact(r) => r.scaled_floor(k as i64),
            RotationNumber::Real(x) => {
                let v = x * k as f64;
                let n = v.round();
                if (v - n).abs() <= INTEGER_GUARD {
                    (n as i64, true)
                } else {
                    (v.floor() as i64, false)
                }
            }
        }
    }
}

impl From<f64> for RotationNumber {
    fn from(x: f64) -> Self {
        RotationNumber::Real(x)
    }
}

impl From<Ratio> for RotationNumber {
    fn from(r: Ratio) -> Self {
        RotationNumber::Exact(r)
    }
}

/// Block decomposition of a path's end behavior.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationProfile {
    /// Maslov contribution of the loop factor (even).
    #[serde(default)]
    pub loop_index: i64,
    #[serde(default)]
    pub elliptic: Vec<RotationNumber>,
    #[serde(default)]
    pub hyperbolic: Vec<i64>,
    #[serde(default)]
    pub degenerate: Option<WilliamsonInvariants>,
}

/// `(μ-, μ+, μ̂)` of an iterate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexTriple {
    pub mu_minus: i64,
    pub mu_plus: i64,
    pub mu_hat: f64,
}

impl IndexTriple {
    /// The CZ index when the iterate is non-degenerate.
    pub fn mu(&self) -> Option<i64> {
        (self.mu_minus == self.mu_plus).then_some(self.mu_minus)
    }
}

/// Index data of an iterate together with the normal-form counts of its
/// degenerate part (elliptic blocks hitting an integer count as zero blocks).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterateIndices {
    pub k: u64,
    pub triple: IndexTriple,
    pub nu_a: u32,
    pub nu0: u32,
    pub b0: u32,
    pub b_plus: u32,
    pub b_minus: u32,
}

impl IterationProfile {
    pub fn elliptic(rhos: &[f64]) -> Self {
        Self { elliptic: rhos.iter().map(|r| RotationNumber::Real(*r)).collect(), ..Default::default() }
    }

    pub fn hyperbolic(hs: &[i64]) -> Self {
        Self { hyperbolic: hs.to_vec(), ..Default::default() }
    }

    pub fn degenerate(w: WilliamsonInvariants) -> Self {
        Self { degenerate: Some(w), ..Default::default() }
    }

    pub fn with_loop(mut self, loop_index: i64) -> Self {
        self.loop_index = loop_index;
        self
    }

    /// Checks the even loop index, finiteness and the degenerate part's identities.
    pub fn validate(&self) -> Result<(), IndexError> {
        if self.loop_index % 2 != 0 {
            return Err(IndexError::InvalidProfile(format!("loop index {} is odd", self.loop_index)));
        }
        if let Some(bad) = self.elliptic.iter().find(|r| !r.value().is_finite()) {
            return Err(IndexError::InvalidProfile(format!("rotation number {bad:?} is not finite")));
        }
        if let Some(w) = &self.degenerate {
            w.check().map_err(IndexError::InvalidProfile)?;
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self, IndexError> {
        let p: Self = serde_json::from_str(s).map_err(|e| IndexError::InvalidProfile(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    /// Half the dimension of the path.
    pub fn dim_half(&self) -> usize {
        self.elliptic.len() + self.hyperbolic.len() + self.degenerate.map_or(0, |w| w.m as usize)
    }

    /// Mean index of the first iterate.
    pub fn mean_index(&self) -> f64 {
        self.loop_index as f64
            + self.elliptic.iter().map(|r| 2.0 * r.value()).sum::<f64>()
            + self.hyperbolic.iter().sum::<i64>() as f64
    }

    /// True if no iterate up to and including `k` is degenerate.
    pub fn is_nondegenerate_at(&self, k: u64) -> bool {
        self.degenerate.is_none_or(|w| w.m == 0) && self.elliptic.iter().all(|r| !r.scaled_floor(k).1)
    }

    /// Exact indices of the `k`-th iterate. `k = 0` gives the constant path.
    pub fn iterate(&self, k: u64) -> IterateIndices {
        let ki = k as i64;
        let mut lo = self.loop_index * ki;
        let mut hi = lo;
        let mut out = IterateIndices {
            k,
            triple: IndexTriple { mu_minus: 0, mu_plus: 0, mu_hat: self.mean_index() * k as f64 },
            nu_a: 0,
            nu0: 0,
            b0: 0,
            b_plus: 0,
            b_minus: 0,
        };
        for r in &self.elliptic {
            let (f, integral) = r.scaled_floor(k);
            if integral {
                lo += 2 * f - 1;
                hi += 2 * f + 1;
                out.nu_a += 1;
                out.nu0 += 1;
            } else {
                lo += 2 * f + 1;
                hi += 2 * f + 1;
            }
        }
        for h in &self.hyperbolic {
            lo += h * ki;
            hi += h * ki;
        }
        if let Some(w) = &self.degenerate {
            lo -= w.lower_shift();
            hi += w.upper_shift();
            out.nu_a += w.nu_a;
            out.nu0 += w.nu0;
            out.b0 += w.b0;
            out.b_plus += w.b_plus;
            out.b_minus += w.b_minus;
        }
        out.triple.mu_minus = lo;
        out.triple.mu_plus = hi;
        out
    }
}

/// `(μ-, μ+, μ̂)` of the `k`-th iterate.
pub fn index_triple(profile: &IterationProfile, k: u64) -> IndexTriple {
    profile.iterate(k).triple
}

/// Degree support `[μ-, μ+ + 1]` of local Floer homology of the `k`-th iterate
/// of a Reeb orbit in a `(2n-1)`-dimensional manifold (profile dimension `n-1`).
pub fn support_interval(profile: &IterationProfile, k: u64, n: usize) -> Result<(i64, i64), IndexError> {
    if n == 0 || profile.dim_half() != n - 1 {
        return Err(IndexError::DimensionMismatch { expected: n.saturating_sub(1), found: profile.dim_half() });
    }
    let t = index_triple(profile, k);
    Ok((t.mu_minus, t.mu_plus + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConvexityWitness {
    pub orbit: usize,
    pub k: u64,
    pub mu_minus: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvexityReport {
    /// `μ- >= n + 1` for every listed iterate.
    pub ok: bool,
    pub witnesses: Vec<ConvexityWitness>,
    /// `μ- >= max(3, 2 + ν_a)` for every listed iterate.
    pub weak_ok: bool,
    pub weak_witnesses: Vec<ConvexityWitness>,
    pub min_mu_minus: Option<i64>,
}

/// Dynamical convexity over the iterates `1..=max_k` of each orbit.
pub fn check_dynamical_convexity(orbits: &[(IterationProfile, u64)], n: usize) -> ConvexityReport {
    let mut report = ConvexityReport {
        ok: true,
        witnesses: Vec::new(),
        weak_ok: true,
        weak_witnesses: Vec::new(),
        min_mu_minus: None,
    };
    for (orbit, (profile, max_k)) in orbits.iter().enumerate() {
        for k in 1..=*max_k {
            let it = profile.iterate(k);
            let mu = it.triple.mu_minus;
            report.min_mu_minus = Some(report.min_mu_minus.map_or(mu, |m: i64| m.min(mu)));
            let w = ConvexityWitness { orbit, k, mu_minus: mu };
            if mu < n as i64 + 1 {
                report.ok = false;
                report.witnesses.push(w);
            }
            if mu < 3.max(2 + it.nu_a as i64) {
                report.weak_ok = false;
                report.weak_witnesses.push(w);
            }
        }
    }
    report
}

/// Writes `k, mu_minus, mu_plus, mu_hat` rows for `k = 1..=k_max`.
pub fn write_index_table<W: Write>(profile: &IterationProfile, k_max: u64, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "mu_minus", "mu_plus", "mu_hat"])?;
    for k in 1..=k_max {
        let t = index_triple(profile, k);
        w.write_record([k.to_string(), t.mu_minus.to_string(), t.mu_plus.to_string(), format!("{}", t.mu_hat)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_example() {
        let t = index_triple(&IterationProfile::elliptic(&[0.3]), 1);
        assert_eq!((t.mu_minus, t.mu_plus), (1, 1));
        assert!((t.mu_hat - 0.6).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_example() {
        let t = index_triple(&IterationProfile::hyperbolic(&[3]), 5);
        assert_eq!((t.mu_minus, t.mu_plus, t.mu_hat), (15, 15, 15.0));
    }

    #[test]
    fn degenerate_shear_example() {
        let w = WilliamsonInvariants { b_plus: 1, nu_g: 1, nu_a: 1, m: 1, ..Default::default() };
        let t = index_triple(&IterationProfile::degenerate(w), 2);
        assert_eq!((t.mu_minus, t.mu_plus, t.mu_hat), (0, 1, 0.0));
    }

    #[test]
    fn exact_rotation_hits_integers() {
        let p = IterationProfile { elliptic: vec![Ratio::new(1, 3).unwrap().into()], ..Default::default() };
        let it = p.iterate(3);
        assert_eq!((it.triple.mu_minus, it.triple.mu_plus, it.nu_a), (1, 3, 1));
        assert!(!p.is_nondegenerate_at(3));
        assert!(p.is_nondegenerate_at(2));
    }

    #[test]
    fn supports() {
        let p = IterationProfile::hyperbolic(&[3, 2]);
        assert_eq!(support_interval(&p, 1, 3).unwrap(), (5, 6));
        assert_eq!(support_interval(&IterationProfile::hyperbolic(&[3]).with_loop(0), 4, 2).unwrap(), (12, 13));
        let e = IterationProfile::elliptic(&[0.49, 0.51]);
        assert_eq!(support_interval(&e, 1, 3).unwrap(), (2, 3));
        assert!(matches!(support_interval(&e, 1, 2), Err(IndexError::DimensionMismatch { .. })));
    }

    #[test]
    fn convexity_examples() {
        let r = check_dynamical_convexity(&[(IterationProfile::hyperbolic(&[2, 0]), 1)], 3);
        assert!(!r.ok);
        assert_eq!(r.witnesses[0].k, 1);
        assert!(check_dynamical_convexity(&[], 3).ok);
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"loop_index": 2, "elliptic": [0.25, "1/3"], "hyperbolic": [1], "degenerate": null}"#;
        let p = IterationProfile::from_json(s).unwrap();
        assert_eq!(p.elliptic[1], RotationNumber::Exact(Ratio::new(1, 3).unwrap()));
        let back: IterationProfile = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(IterationProfile::from_json(r#"{"loop_index": 1}"#).is_err());
        assert!(IterationProfile::from_json(r#"{"loops": 1}"#).is_err());
    }

    #[test]
    fn table_has_header_and_rows() {
        let mut buf = Vec::new();
        write_index_table(&IterationProfile::hyperbolic(&[2]), 3, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "k,mu_minus,mu_plus,mu_hat\n1,2,2,2\n2,4,4,4\n3,6,6,6\n");
    }
}
