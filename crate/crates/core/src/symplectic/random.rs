//! Random symplectic matrices for conjugation and fuzzing.

use nalgebra::DMatrix;
use rand::Rng;

use super::{standard_j, SymplecticMatrix};

/// Random symmetric `n x n` matrix with entries in `[-scale, scale]`.
pub fn random_symmetric<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-scale..=scale);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Random, moderately conditioned element of `Sp(2m)`: a product of
/// `exp(J S)`, an upper shear `[[I, B], [0, I]]` with `B` symmetric, and
/// `diag(D, D^{-1})` with `D` positive diagonal in `[1/2, 2]`.
pub fn random_symplectic<R: Rng + ?Sized>(m: usize, rng: &mut R) -> SymplecticMatrix {
    let j = standard_j(m);
    let flow = (&j * random_symmetric(2 * m, 0.8, rng)).exp();
    let b = random_symmetric(m, 0.8, rng);
    let mut shear = DMatrix::identity(2 * m, 2 * m);
    shear.view_mut((0, m), (m, m)).copy_from(&b);
    let mut stretch = DMatrix::identity(2 * m, 2 * m);
    for i in 0..m {
        let d: f64 = rng.random_range(0.5..2.0);
        stretch[(i, i)] = d;
        stretch[(m + i, m + i)] = 1.0 / d;
    }
    let entries = flow * shear * stretch;
    super::validate_symplectic(&entries, 1e-8).expect("product of symplectic factors")
}
