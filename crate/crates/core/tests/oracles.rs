//! Library outputs against closed forms and brute-force recomputation.

mod common;

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reeb_lab::ellipsoid::{spectrum, EllipsoidSpec};
use reeb_lab::fixed_point::{brouwer_index, brouwer_index_samples, PlanarMapSample};
use reeb_lab::floer::barcode::{barcode, FilteredComplex};
use reeb_lab::hamiltonian::ProfileSpec;
use reeb_lab::index::{cz_index_sampled, SymplecticPath};
use reeb_lab::symplectic::williamson::{NormalForm, WilliamsonInvariants};
use reeb_lab::symplectic::{williamson_invariants, SymplecticMatrix};

#[test]
fn ellipsoid_iterates_match_sampled_linearized_flow() {
    let weights = [1.0, SQRT_2, 3f64.sqrt()];
    let spec = EllipsoidSpec::new(weights.to_vec()).unwrap();
    for j in 0..3 {
        let profile = spec.profile(j).unwrap();
        let factors: Vec<f64> = (0..3).filter(|&i| i != j).map(|i| weights[j] / weights[i]).collect();
        let base = SymplecticPath::rotation(factors[0], 48)
            .unwrap()
            .direct_sum(&SymplecticPath::rotation(factors[1], 48).unwrap())
            .unwrap();
        for k in 1..=12u64 {
            let transverse = cz_index_sampled(&base.iterate(k as usize), 1e-8).unwrap();
            // the trivialization along the orbit winds twice per period
            let sampled = transverse + 2 * k as i64;
            let closed: i64 = 2 * k as i64 + factors.iter().map(|r| 2 * (k as f64 * r).floor() as i64 + 1).sum::<i64>();
            let t = profile.iterate(k).triple;
            assert_eq!((t.mu_minus, t.mu_plus), (sampled, sampled), "orbit {j}, k = {k}");
            assert_eq!(sampled, closed);
        }
    }
}

#[test]
fn ellipsoid_spectrum_matches_enumeration() {
    let spec = EllipsoidSpec::new(vec![1.0, 1.5, 2.2]).unwrap();
    let cutoff = 40.0;
    let s = spectrum(&spec, cutoff);
    let mut brute: Vec<(f64, usize, u64)> = Vec::new();
    for (j, a) in [1.0, 1.5, 2.2].iter().enumerate() {
        for k in 1.. {
            let v = k as f64 * PI * a;
            if v > cutoff {
                break;
            }
            brute.push((v, j, k));
        }
    }
    brute.sort_by(|x, y| x.0.total_cmp(&y.0));
    assert_eq!(s.entries.len(), brute.len());
    for (e, b) in s.entries.iter().zip(&brute) {
        assert!((e.value - b.0).abs() < 1e-12);
    }
}

#[test]
fn normal_form_table() {
    let forms = [
        NormalForm::Zero,
        NormalForm::QPlus(1),
        NormalForm::QMinus(1),
        NormalForm::QPlus(2),
        NormalForm::QMinus(2),
        NormalForm::Q0(3),
        NormalForm::QPlus(3),
        NormalForm::QMinus(3),
    ];
    for f in forms {
        let s = f.hessian();
        let got = williamson_invariants(&SymplecticMatrix::exp_of(&s), 1e-9).unwrap().invariants;
        assert_eq!(got, WilliamsonInvariants::of_block(f), "{f:?}");
    }
    let pair = NormalForm::direct_sum(&[NormalForm::Q0(3), NormalForm::QMinus(2)]);
    let got = williamson_invariants(&SymplecticMatrix::exp_of(&pair), 1e-9).unwrap().invariants;
    assert_eq!(got, WilliamsonInvariants::of_block(NormalForm::Q0(3)).direct_sum(&WilliamsonInvariants::of_block(NormalForm::QMinus(2))));
}

#[test]
fn six_dimensional_perturbation_oracle() {
    let eps = 1e-3;
    for f in [NormalForm::Q0(3), NormalForm::QPlus(3), NormalForm::QMinus(3)] {
        let s = f.hessian();
        let w = WilliamsonInvariants::of_block(f);
        let id = DMatrix::<f64>::identity(6, 6) * eps;
        let up = cz_index_sampled(&SymplecticPath::quadratic_flow(&(&s + &id), 64).unwrap(), 1e-8).unwrap();
        let down = cz_index_sampled(&SymplecticPath::quadratic_flow(&(&s - &id), 64).unwrap(), 1e-8).unwrap();
        assert_eq!((down, up), (-w.lower_shift(), w.upper_shift()), "{f:?}");
    }
}

#[test]
fn quadratic_profile_closed_form() {
    // h = a (r - 1)^2 / (2L), L = r_max - 1, so A_h(r) = a (r^2 - 1) / (2L)
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let a = rng.random_range(1.0..30.0);
        let r_max = rng.random_range(1.2..5.0);
        let l = r_max - 1.0;
        let h = ProfileSpec::quadratic(a, r_max).build().unwrap();
        assert!((h.intercept() - a * (r_max * r_max - 1.0) / (2.0 * l)).abs() < 1e-9 * a);
        for _ in 0..20 {
            let t = rng.random_range(0.0..a);
            let r = 1.0 + t * l / a;
            let (action, level) = h.action_from_period(t).unwrap();
            assert!((level - r).abs() < 1e-10, "r = {level}, want {r}");
            assert!((action - a * (r * r - 1.0) / (2.0 * l)).abs() < 1e-9 * a);
        }
    }
}

#[test]
fn example_complex_bars() {
    let c = FilteredComplex::from_json(include_str!("../examples/data/complex.json")).unwrap();
    let bars: Vec<(f64, f64, i64)> = barcode(&c).unwrap().iter().map(|b| (b.birth, b.death, b.degree)).collect();
    let mut want = vec![(0.0, 1.0, 0), (0.0, f64::INFINITY, 0), (0.5, 2.0, 0), (3.0, 4.5, 1)];
    let key = |x: &(f64, f64, i64)| (x.2, x.0.to_bits(), x.1.to_bits());
    let mut got = bars.clone();
    got.sort_by_key(key);
    want.sort_by_key(key);
    assert_eq!(got, want);
}

#[test]
fn barcode_generator_accounting() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let c = common::random_complex(&mut rng, 15);
        let bars = barcode(&c).unwrap();
        let finite = bars.iter().filter(|b| b.death.is_finite()).count();
        let essential = bars.len() - finite;
        assert_eq!(2 * finite + essential, c.generators.len());
        // essential bars in degree q count the homology of the full complex
        for q in 0..=2 {
            let ess = bars.iter().filter(|b| b.degree == q && !b.death.is_finite()).count();
            assert_eq!(ess, common::persistent_rank(&c, q, f64::INFINITY, f64::INFINITY));
        }
    }
}

#[test]
fn planar_indices() {
    let saddle = |[x, y]: [f64; 2]| [x + 2.0 * x * y, y + x * x - y * y];
    assert_eq!(brouwer_index(saddle, [0.0, 0.0], 0.05, 64).unwrap().index, -2);
    let csv = include_str!("../examples/data/monkey_saddle.csv");
    assert_eq!(brouwer_index_samples(&PlanarMapSample::from_csv(csv.as_bytes()).unwrap()).unwrap(), -2);
    let hyperbolic = |[x, y]: [f64; 2]| [2.0 * x, 0.5 * y];
    assert_eq!(brouwer_index(hyperbolic, [0.0, 0.0], 0.1, 32).unwrap().index, -1);
    let flip = |[x, y]: [f64; 2]| [-2.0 * x, -0.5 * y];
    assert_eq!(brouwer_index(flip, [0.0, 0.0], 0.1, 32).unwrap().index, 1);
    let shift = |[x, y]: [f64; 2]| [x + 1.0, y];
    assert_eq!(brouwer_index(shift, [0.0, 0.0], 0.1, 32).unwrap().index, 0);
    // fixed point at the centre of a shifted disk
    let around = |[x, y]: [f64; 2]| [2.0 * (x - 1.0) + 1.0, 0.5 * (y - 1.0) + 1.0];
    assert_eq!(brouwer_index(around, [1.0, 1.0], 0.3, 32).unwrap().index, -1);
}
