//! Symplectic linear algebra on `R^{2m}` with coordinates `(q_1..q_m, p_1..p_m)`.
//!
//! The standard form is `ω(u, w) = uᵀ Jᵀ w` with `J = [[0, -I], [I, 0]]`, so the
//! flow of a quadratic Hamiltonian `½ zᵀ S z` is `exp(J S t)`.

pub mod random;
pub mod williamson;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub use williamson::{
    invariants_from_form, unipotent_log, williamson_invariants, NormalForm, WilliamsonInvariants,
    WilliamsonReport,
};

/// Default tolerance for unit-scaled matrices.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymplecticError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has odd dimension {0}")]
    OddDimension(usize),
    #[error("matrix is empty")]
    Empty,
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("matrix is not symplectic: residual {residual:.3e} exceeds {tol:.3e}")]
    NotSymplectic { residual: f64, tol: f64 },
    #[error("eigenvalue {re:+.6}{im:+.6}i has modulus {modulus:.12}: too close to the unit circle to classify")]
    BorderlineSpectrum { re: f64, im: f64, modulus: f64 },
    #[error("matrix is not unipotent: |(A-I)^{power}| = {residual:.3e}")]
    NotUnipotent { power: usize, residual: f64 },
    #[error("normal form unresolved ({reason}); residual {residual:.3e}")]
    UnresolvedNormalForm { reason: String, residual: f64 },
    #[error("rows have inconsistent lengths")]
    RaggedRows,
}

/// The standard complex structure `J = [[0, -I], [I, 0]]` on `R^{2m}`.
pub fn standard_j(m: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        j[(i, m + i)] = -1.0;
        j[(m + i, i)] = 1.0;
    }
    j
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// A validated element of `Sp(2m)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymplecticMatrix {
    dim_half: usize,
    #[serde(serialize_with = "serialize_rows")]
    entries: DMatrix<f64>,
}

fn serialize_rows<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(matrix_to_rows(m))
}

/// Row-major nested vectors, the JSON wire format for matrices.
pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Inverse of [`matrix_to_rows`].
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, SymplecticError> {
    let n = rows.len();
    if n == 0 {
        return Err(SymplecticError::Empty);
    }
    let c = rows[0].len();
    if rows.iter().any(|r| r.len() != c) {
        return Err(SymplecticError::RaggedRows);
    }
    Ok(DMatrix::from_fn(n, c, |i, j| rows[i][j]))
}

/// Residual `max |MᵀJM - J|` relative to `max(1, |M|)^2`.
pub fn symplectic_residual(m: &DMatrix<f64>) -> f64 {
    let half = m.nrows() / 2;
    let j = standard_j(half);
    let r = m.transpose() * &j * m - &j;
    max_abs(&r) / max_abs(m).max(1.0).powi(2)
}

/// Validates that `m` preserves the standard symplectic form.
///
/// The residual is scaled by `max(1, |M|)^2` so that conjugated or stretched
/// matrices are judged on the same footing as unit-scaled ones. `det M = 1`
/// follows from the form check for connected components but is also tested.
pub fn validate_symplectic(m: &DMatrix<f64>, tol: f64) -> Result<SymplecticMatrix, SymplecticError> {
    let (r, c) = m.shape();
    if r != c {
        return Err(SymplecticError::NotSquare { rows: r, cols: c });
    }
    if r == 0 {
        return Err(SymplecticError::Empty);
    }
    if r % 2 == 1 {
        return Err(SymplecticError::OddDimension(r));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(SymplecticError::NonFinite);
    }
    let residual = symplectic_residual(m);
    if residual > tol {
        return Err(SymplecticError::NotSymplectic { residual, tol });
    }
    let det = m.clone().determinant();
    let det_residual = (det - 1.0).abs() / max_abs(m).max(1.0).powi(r as i32);
    if det_residual > tol.sqrt() {
        return Err(SymplecticError::NotSymplectic { residual: det_residual, tol });
    }
    Ok(SymplecticMatrix { dim_half: r / 2, entries: m.clone() })
}

impl SymplecticMatrix {
    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self, SymplecticError> {
        validate_symplectic(&matrix_from_rows(rows)?, tol)
    }

    pub fn identity(m: usize) -> Self {
        Self { dim_half: m, entries: DMatrix::identity(2 * m, 2 * m) }
    }

    /// Rotation by `theta` in the `(q, p)` plane, i.e. `exp(J θ I)`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { dim_half: 1, entries: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]) }
    }

    /// `diag(λ, 1/λ)`.
    pub fn stretch(lambda: f64) -> Self {
        Self { dim_half: 1, entries: DMatrix::from_row_slice(2, 2, &[lambda, 0.0, 0.0, 1.0 / lambda]) }
    }

    /// `exp(J S)` for symmetric `S`.
    pub fn exp_of(s: &DMatrix<f64>) -> Self {
        let m = s.nrows() / 2;
        Self { dim_half: m, entries: (standard_j(m) * s).exp() }
    }

    pub fn dim_half(&self) -> usize {
        self.dim_half
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        matrix_to_rows(&self.entries)
    }

    pub fn inverse(&self) -> Self {
        let j = standard_j(self.dim_half);
        Self { dim_half: self.dim_half, entries: -(&j * self.entries.transpose() * &j) }
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim_half, other.dim_half, "dimension mismatch");
        Self { dim_half: self.dim_half, entries: &self.entries * &other.entries }
    }

    pub fn power(&self, k: u32) -> Self {
        Self { dim_half: self.dim_half, entries: self.entries.pow(k) }
    }

    /// Symplectic direct sum, interleaving coordinates so the result is again in
    /// `(q, p)` order.
    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            dim_half: self.dim_half + other.dim_half,
            entries: direct_sum_qp(&self.entries, &other.entries),
        }
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.entries.complex_eigenvalues().iter().copied().collect()
    }
}

/// Direct sum of two `(q, p)`-ordered square matrices of even size, returned in
/// `(q, p)` order on the combined space.
pub fn direct_sum_qp(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ma, mb) = (a.nrows() / 2, b.nrows() / 2);
    let m = ma + mb;
    let ia = |i: usize| if i < ma { i } else { m + (i - ma) };
    let ib = |i: usize| if i < mb { ma + i } else { m + ma + (i - mb) };
    let mut out = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..2 * ma {
        for j in 0..2 * ma {
            out[(ia(i), ia(j))] = a[(i, j)];
        }
    }
    for i in 0..2 * mb {
        for j in 0..2 * mb {
            out[(ib(i), ib(j))] = b[(i, j)];
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Elliptic,
    Hyperbolic,
    Unipotent,
    Other,
}

/// A group of eigenvalues closed under `λ ↦ 1/λ, λ̄`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralBlock {
    pub kind: BlockKind,
    /// Representative eigenvalue (upper half plane or modulus > 1).
    pub re: f64,
    pub im: f64,
    /// Number of copies of the full orbit `{λ, 1/λ, λ̄, 1/λ̄}` (or of `{1}` pairs for unipotent).
    pub multiplicity: usize,
    /// Real dimension of the block.
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub blocks: Vec<SpectralBlock>,
    /// Half the algebraic multiplicity of the eigenvalue 1.
    pub nu_a: usize,
    /// Geometric multiplicity of the eigenvalue 1.
    pub nu_g: usize,
}

impl SpectralReport {
    pub fn count(&self, kind: BlockKind) -> usize {
        self.blocks.iter().filter(|b| b.kind == kind).map(|b| b.multiplicity).sum()
    }
}

/// Numerical rank: singular values above `thr`.
pub(crate) fn numerical_rank(m: &DMatrix<f64>, thr: f64) -> usize {
    m.clone().svd(false, false).singular_values.iter().filter(|s| **s > thr).count()
}

/// Groups the spectrum of `m` into elliptic, hyperbolic, unipotent and other blocks.
///
/// Eigenvalues within `tol^(1/2m)` of 1 form the unipotent cluster (a Jordan
/// block of size `s` spreads its eigenvalues to distance about `ε^(1/s)`).
/// An eigenvalue is on the circle when `||λ| - 1| <= tol`, off it when the gap
/// is at least `sqrt(tol)`, and borderline in between. `-1` counts as elliptic.
pub fn spectral_classification(m: &SymplecticMatrix, tol: f64) -> Result<SpectralReport, SymplecticError> {
    let dim = 2 * m.dim_half;
    let eig = m.eigenvalues();
    let unip_radius = tol.powf(1.0 / dim as f64).max(tol);
    let one = Complex64::new(1.0, 0.0);
    let (unip, rest): (Vec<_>, Vec<_>) = eig.into_iter().partition(|z| (z - one).norm() <= unip_radius);
    if unip.len() % 2 == 1 {
        let z = unip[0];
        return Err(SymplecticError::BorderlineSpectrum { re: z.re, im: z.im, modulus: z.norm() });
    }

    let mut blocks = Vec::new();
    if !unip.is_empty() {
        blocks.push(SpectralBlock {
            kind: BlockKind::Unipotent,
            re: 1.0,
            im: 0.0,
            multiplicity: unip.len() / 2,
            dimension: unip.len(),
        });
    }

    let cluster = tol.sqrt().max(1e-7);
    let mut reps: Vec<(BlockKind, Complex64, usize)> = Vec::new();
    let mut push = |kind: BlockKind, z: Complex64, dimension: usize| {
        if let Some(entry) = reps.iter_mut().find(|(k, w, _)| *k == kind && (w - z).norm() <= cluster) {
            entry.2 += dimension;
        } else {
            reps.push((kind, z, dimension));
        }
    };
    for z in rest {
        let gap = (z.norm() - 1.0).abs();
        if gap > tol && gap < tol.sqrt() {
            return Err(SymplecticError::BorderlineSpectrum { re: z.re, im: z.im, modulus: z.norm() });
        }
        let real = z.im.abs() <= tol.sqrt() * z.norm().max(1.0);
        if gap <= tol {
            if real {
                // -1: each eigenvalue counts once, pairs of them form a block.
                push(BlockKind::Elliptic, Complex64::new(-1.0, 0.0), 1);
            } else if z.im > 0.0 {
                push(BlockKind::Elliptic, z, 2);
            }
        } else if real {
            if z.norm() > 1.0 {
                push(BlockKind::Hyperbolic, Complex64::new(z.re, 0.0), 2);
            }
        } else if z.norm() > 1.0 && z.im > 0.0 {
            push(BlockKind::Other, z, 4);
        }
    }
    for (kind, z, dimension) in reps {
        let unit = match kind {
            BlockKind::Other => 4,
            _ => 2,
        };
        blocks.push(SpectralBlock { kind, re: z.re, im: z.im, multiplicity: dimension / unit, dimension });
    }
    let total: usize = blocks.iter().map(|b| b.dimension).sum();
    if total != dim {
        // Reciprocal partner missing: the spectrum is not symmetric at this tolerance.
        return Err(SymplecticError::UnresolvedNormalForm {
            reason: format!("spectral blocks cover {total} of {dim} dimensions"),
            residual: symplectic_residual(m.matrix()),
        });
    }

    let nu_a = unip.len() / 2;
    let scale = max_abs(m.matrix()).max(1.0);
    let shifted = m.matrix() - DMatrix::identity(dim, dim);
    let nu_g = dim - numerical_rank(&shifted, tol.sqrt() * scale);
    Ok(SpectralReport { blocks, nu_a, nu_g: if nu_a == 0 { 0 } else { nu_g } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_canonical_blocks_validate() {
        let id = DMatrix::<f64>::identity(4, 4);
        assert_eq!(validate_symplectic(&id, DEFAULT_TOL).unwrap().dim_half(), 2);
        let m = SymplecticMatrix::rotation(0.7).direct_sum(&SymplecticMatrix::stretch(2.0));
        assert!(validate_symplectic(m.matrix(), DEFAULT_TOL).is_ok());
    }

    #[test]
    fn rejects_bad_shapes_and_forms() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 2.0, 0.5, 1.0 / 3.0]));
        assert!(matches!(validate_symplectic(&d, DEFAULT_TOL), Err(SymplecticError::NotSymplectic { .. })));
        assert!(matches!(
            validate_symplectic(&DMatrix::identity(3, 3), DEFAULT_TOL),
            Err(SymplecticError::OddDimension(3))
        ));
        assert!(matches!(
            validate_symplectic(&DMatrix::zeros(2, 4), DEFAULT_TOL),
            Err(SymplecticError::NotSquare { .. })
        ));
    }

    #[test]
    fn direct_sum_is_symplectic_and_inverse_works() {
        let a = SymplecticMatrix::rotation(1.0).direct_sum(&SymplecticMatrix::stretch(3.0));
        assert!(symplectic_residual(a.matrix()) < 1e-14);
        let prod = a.compose(&a.inverse());
        assert!(max_abs(&(prod.matrix() - DMatrix::identity(4, 4))) < 1e-14);
    }

    #[test]
    fn classification_examples() {
        let m = SymplecticMatrix::rotation(1.0).direct_sum(&SymplecticMatrix::stretch(3.0));
        let r = spectral_classification(&m, DEFAULT_TOL).unwrap();
        assert_eq!(r.count(BlockKind::Elliptic), 1);
        assert_eq!(r.count(BlockKind::Hyperbolic), 1);
        assert_eq!(r.nu_a, 0);

        let r = spectral_classification(&SymplecticMatrix::identity(1), DEFAULT_TOL).unwrap();
        assert_eq!((r.count(BlockKind::Unipotent), r.nu_a, r.nu_g), (1, 1, 2));

        let shear = validate_symplectic(&DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]), DEFAULT_TOL).unwrap();
        let r = spectral_classification(&shear, DEFAULT_TOL).unwrap();
        assert_eq!((r.nu_a, r.nu_g), (1, 1));
    }

    #[test]
    fn minus_one_is_elliptic() {
        let m = SymplecticMatrix::rotation(std::f64::consts::PI);
        let r = spectral_classification(&m, DEFAULT_TOL).unwrap();
        assert_eq!(r.blocks.len(), 1);
        assert_eq!(r.blocks[0].kind, BlockKind::Elliptic);
        assert_eq!(r.blocks[0].multiplicity, 1);
    }

    #[test]
    fn borderline_modulus_is_reported() {
        // Near 1 the unipotent cluster absorbs such eigenvalues; away from 1 they are borderline.
        let mut m = SymplecticMatrix::stretch(1.0 + 1e-6);
        m.entries *= -1.0;
        assert!(matches!(
            spectral_classification(&m, DEFAULT_TOL),
            Err(SymplecticError::BorderlineSpectrum { .. })
        ));
        let e = 1e-6;
        let s = DMatrix::from_row_slice(4, 4, &[0.0, 0.0, e, 0.3, 0.0, 0.0, -0.3, e, e, -0.3, 0.0, 0.0, 0.3, e, 0.0, 0.0]);
        assert!(matches!(
            spectral_classification(&SymplecticMatrix::exp_of(&s), DEFAULT_TOL),
            Err(SymplecticError::BorderlineSpectrum { .. })
        ));
    }

    #[test]
    fn loxodromic_quadruple_is_other() {
        // exp(J S) with S mixing a hyperbolic and a rotational part in R^4.
        let s = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, 0.0, 1.0, 0.3, 0.0, 0.0, -0.3, 1.0, 1.0, -0.3, 0.0, 0.0, 0.3, 1.0, 0.0, 0.0],
        );
        let m = SymplecticMatrix::exp_of(&s);
        let r = spectral_classification(&m, DEFAULT_TOL).unwrap();
        assert_eq!(r.count(BlockKind::Other), 1, "{r:?}");
    }
}
