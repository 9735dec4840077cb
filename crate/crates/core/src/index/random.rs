//! Random iteration profiles for fuzzing.

use rand::Rng;

use super::{IterationProfile, RotationNumber};
use crate::rational::Ratio;
use crate::symplectic::williamson::NormalForm;
use crate::symplectic::WilliamsonInvariants;

/// Random profile of half-dimension `m`: elliptic blocks with rational
/// (denominator at most 12) or real rotation numbers, hyperbolic blocks with
/// `h ∈ [-3, 5]`, a degenerate factor assembled from zero and `Q±` blocks of
/// half-dimension 1 or 2, and an even loop index in `[-4, 4]`.
pub fn random_profile<R: Rng + ?Sized>(m: usize, rng: &mut R) -> IterationProfile {
    let mut p = IterationProfile { loop_index: 2 * rng.random_range(-2..=2), ..Default::default() };
    let mut left = m;
    let mut degenerate: Option<WilliamsonInvariants> = None;
    while left > 0 {
        match rng.random_range(0..4) {
            0 => {
                let q = rng.random_range(1..=12);
                let r = Ratio::new(rng.random_range(-2 * q..=2 * q), q).expect("q > 0");
                p.elliptic.push(RotationNumber::Exact(r));
                left -= 1;
            }
            1 => {
                p.elliptic.push(RotationNumber::Real(rng.random_range(-1.5..1.5)));
                left -= 1;
            }
            2 => {
                p.hyperbolic.push(rng.random_range(-3..=5));
                left -= 1;
            }
            _ => {
                let d = if left >= 2 && rng.random_bool(0.5) { 2 } else { 1 };
                let (form, d) = match rng.random_range(0..3) {
                    0 => (NormalForm::Zero, 1),
                    1 => (NormalForm::QPlus(d), d),
                    _ => (NormalForm::QMinus(d), d),
                };
                let w = WilliamsonInvariants::of_block(form);
                degenerate = Some(degenerate.map_or(w, |acc| acc.direct_sum(&w)));
                left -= d;
            }
        }
    }
    p.degenerate = degenerate;
    p
}
