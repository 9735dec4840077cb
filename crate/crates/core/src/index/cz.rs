//! Conley–Zehnder index of a sampled path in `Sp(2m)`.
//!
//! The index is computed as a Maslov-type intersection index of the graph of
//! `Ψ(t)` with the diagonal in `(R^{2m} × R^{2m}, (-ω) ⊕ ω)`. Both Lagrangians
//! are encoded as unitary matrices `W = Z (Z*Z)⁻¹ Zᵀ` for a frame `Z = X + iY`;
//! then `M(t) = V* W_Γ(t) V̄`, with `V` a unitary frame of the diagonal, starts at
//! the identity and has eigenvalue 1 exactly when `Ψ(t)` does.
//! Writing `φ_j ∈ (0, 2π)` for the eigenvalue angles of `M(1)` and `L` for the
//! continuous lift of `arg det M` along the path,
//!
//! `μ = (L - Σ φ_j) / 2π + m`.
//!
//! This normalizes a short positive definite quadratic flow to index `m`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::IndexError;
use crate::symplectic::{max_abs, standard_j, symplectic_residual};

/// A path in `Sp(2m)` sampled at uniform times `0 = t_0 < ... < t_N = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticPath {
    m: usize,
    samples: Vec<DMatrix<f64>>,
}

impl SymplecticPath {
    /// Validates shape, the start at the identity and symplecticity of every sample.
    pub fn new(samples: Vec<DMatrix<f64>>, tol: f64) -> Result<Self, IndexError> {
        let first = samples.first().ok_or(IndexError::EmptyPath)?;
        let dim = first.nrows();
        if dim == 0 || dim % 2 == 1 {
            return Err(IndexError::DimensionMismatch { expected: 2, found: dim });
        }
        for (i, s) in samples.iter().enumerate() {
            if s.shape() != (dim, dim) {
                return Err(IndexError::DimensionMismatch { expected: dim, found: s.nrows() });
            }
            let residual = symplectic_residual(s);
            if !residual.is_finite() || residual > tol {
                return Err(IndexError::NotSymplectic { sample: i, residual });
            }
        }
        let start = max_abs(&(first - DMatrix::identity(dim, dim)));
        if start > tol {
            return Err(IndexError::NotIdentityStart { residual: start });
        }
        Ok(Self { m: dim / 2, samples })
    }

    /// Samples `f` at `intervals + 1` uniform times in `[0, 1]`.
    pub fn from_fn(intervals: usize, f: impl Fn(f64) -> DMatrix<f64>) -> Result<Self, IndexError> {
        let n = intervals.max(1);
        Self::new((0..=n).map(|i| f(i as f64 / n as f64)).collect(), 1e-8)
    }

    /// `t ↦ exp(J S t)` for symmetric `S`.
    pub fn quadratic_flow(s: &DMatrix<f64>, intervals: usize) -> Result<Self, IndexError> {
        let j = standard_j(s.nrows() / 2);
        let x = &j * s;
        Self::from_fn(intervals, |t| (&x * t).exp())
    }

    /// Rotation by `2πρt` in `R^2`.
    pub fn rotation(rho: f64, intervals: usize) -> Result<Self, IndexError> {
        Self::from_fn(intervals, |t| {
            let (s, c) = (2.0 * PI * rho * t).sin_cos();
            DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
        })
    }

    /// `t ↦ diag(e^{λt}, e^{-λt})`.
    pub fn hyperbolic(lambda: f64, intervals: usize) -> Result<Self, IndexError> {
        Self::from_fn(intervals, |t| {
            DMatrix::from_row_slice(2, 2, &[(lambda * t).exp(), 0.0, 0.0, (-lambda * t).exp()])
        })
    }

    pub fn dim_half(&self) -> usize {
        self.m
    }

    pub fn samples(&self) -> &[DMatrix<f64>] {
        &self.samples
    }

    pub fn endpoint(&self) -> &DMatrix<f64> {
        self.samples.last().expect("non-empty")
    }

    /// Sample-wise symplectic direct sum. Both paths must have the same number of samples.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, IndexError> {
        if self.samples.len() != other.samples.len() {
            return Err(IndexError::DimensionMismatch { expected: self.samples.len(), found: other.samples.len() });
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| crate::symplectic::direct_sum_qp(a, b))
            .collect();
        Ok(Self { m: self.m + other.m, samples })
    }

    /// Product with a loop sampled at the same times: `t ↦ φ(t) Ψ(t)`.
    pub fn times_loop(&self, loop_path: &Self) -> Result<Self, IndexError> {
        if self.samples.len() != loop_path.samples.len() || self.m != loop_path.m {
            return Err(IndexError::DimensionMismatch { expected: self.samples.len(), found: loop_path.samples.len() });
        }
        let samples = loop_path.samples.iter().zip(&self.samples).map(|(l, p)| l * p).collect();
        Ok(Self { m: self.m, samples })
    }

    /// The `k`-th iterate on `[0, k]`, reparametrized to `[0, 1]`:
    /// `Φ(t - j) Φ(1)^j` on the `j`-th unit interval.
    pub fn iterate(&self, k: usize) -> Self {
        let end = self.endpoint().clone();
        let mut power = DMatrix::identity(2 * self.m, 2 * self.m);
        let mut samples = vec![self.samples[0].clone()];
        for _ in 0..k {
            samples.extend(self.samples.iter().skip(1).map(|s| s * &power));
            power = &end * power;
        }
        Self { m: self.m, samples }
    }
}

/// Darboux frame `(Q, P)` of the graph of `psi` in `R^{4m}`.
///
/// Coordinates on `R^{4m}` with form `(-ω) ⊕ ω` are put in Darboux form as
/// `Q = (p, q')`, `P = (q, p')`; the frame columns are `(e_i, Ψ e_i)`.
fn graph_frame(psi: &DMatrix<f64>, m: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = 2 * m;
    let mut big_q = DMatrix::<f64>::zeros(n, n);
    let mut big_p = DMatrix::<f64>::zeros(n, n);
    for col in 0..n {
        for r in 0..m {
            big_q[(r, col)] = if col == m + r { 1.0 } else { 0.0 };
            big_p[(r, col)] = if col == r { 1.0 } else { 0.0 };
            big_q[(m + r, col)] = psi[(r, col)];
            big_p[(m + r, col)] = psi[(m + r, col)];
        }
    }
    (big_q, big_p)
}

fn complexify(q: &DMatrix<f64>, p: &DMatrix<f64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(q.nrows(), q.ncols(), |i, j| Complex64::new(q[(i, j)], p[(i, j)]))
}

/// Unitary representative `W = Z G⁻¹ Zᵀ` of the graph of `psi`.
fn graph_unitary(psi: &DMatrix<f64>, m: usize) -> DMatrix<Complex64> {
    let (big_q, big_p) = graph_frame(psi, m);
    let g = big_q.transpose() * &big_q + big_p.transpose() * &big_p;
    let g_inv = g.try_inverse().expect("graph frame has full rank");
    let z = complexify(&big_q, &big_p);
    &z * g_inv.map(|x| Complex64::new(x, 0.0)) * z.transpose()
}

fn relative_unitary(psi: &DMatrix<f64>, v: &DMatrix<Complex64>, m: usize) -> DMatrix<Complex64> {
    let w = graph_unitary(psi, m);
    v.adjoint() * w * v.map(|c| c.conj())
}

/// Conley–Zehnder index of a sampled path with non-degenerate endpoint.
///
/// Fails with [`IndexError::SamplingTooCoarse`] when `arg det M` moves by more
/// than `π/2` between consecutive samples, and with
/// [`IndexError::DegenerateEndpoint`] when `Ψ(1)` has an eigenvalue within
/// `tol` of 1 (measured on the unitary `M(1)`).
pub fn cz_index_sampled(path: &SymplecticPath, tol: f64) -> Result<i64, IndexError> {
    let m = path.m;
    let n = 2 * m;
    // Unitary frame of the diagonal: the graph frame of the identity is an
    // orthogonal Lagrangian frame with G = 2I.
    let (dq, dp) = graph_frame(&DMatrix::identity(n, n), m);
    let v = complexify(&dq, &dp) * Complex64::new(0.5f64.sqrt(), 0.0);

    let mut lift = 0.0;
    let mut prev = Complex64::new(1.0, 0.0);
    let mut last = None;
    for (i, psi) in path.samples.iter().enumerate() {
        let mm = relative_unitary(psi, &v, m);
        let det = mm.determinant();
        let det = det / det.norm();
        if i > 0 {
            let step = (det / prev).arg();
            if step.abs() > PI / 2.0 {
                return Err(IndexError::SamplingTooCoarse { sample: i, increment: step });
            }
            lift += step;
        }
        prev = det;
        last = Some(mm);
    }
    let end = last.expect("non-empty path");
    let eig = end.schur().eigenvalues().ok_or(IndexError::EigenSolverFailed)?;
    let mut angle_sum = 0.0;
    for z in eig.iter() {
        let dist = (z - Complex64::new(1.0, 0.0)).norm();
        if dist <= tol {
            return Err(IndexError::DegenerateEndpoint { distance: dist });
        }
        let mut a = z.arg();
        if a <= 0.0 {
            a += 2.0 * PI;
        }
        angle_sum += a;
    }
    let raw = (lift - angle_sum) / (2.0 * PI) + m as f64;
    let rounded = raw.round();
    if (raw - rounded).abs() > 1e-6 {
        return Err(IndexError::NonIntegral { value: raw });
    }
    Ok(rounded as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_paths() {
        for (rho, expected) in [(0.3, 1), (1.2, 3), (-0.3, -1), (2.7, 5), (0.999, 1)] {
            let path = SymplecticPath::rotation(rho, 400).unwrap();
            assert_eq!(cz_index_sampled(&path, 1e-9).unwrap(), expected, "rho = {rho}");
        }
    }

    #[test]
    fn hyperbolic_path_has_index_zero() {
        let path = SymplecticPath::hyperbolic(1.0, 100).unwrap();
        assert_eq!(cz_index_sampled(&path, 1e-9).unwrap(), 0);
    }

    #[test]
    fn small_positive_definite_flow_has_index_m() {
        for m in 1..=3 {
            let s = DMatrix::<f64>::identity(2 * m, 2 * m) * 0.1;
            let path = SymplecticPath::quadratic_flow(&s, 50).unwrap();
            assert_eq!(cz_index_sampled(&path, 1e-9).unwrap(), m as i64);
            let path = SymplecticPath::quadratic_flow(&(-s), 50).unwrap();
            assert_eq!(cz_index_sampled(&path, 1e-9).unwrap(), -(m as i64));
        }
    }

    #[test]
    fn degenerate_endpoint_is_rejected() {
        let path = SymplecticPath::rotation(1.0, 100).unwrap();
        assert!(matches!(cz_index_sampled(&path, 1e-9), Err(IndexError::DegenerateEndpoint { .. })));
    }

    #[test]
    fn coarse_sampling_is_detected() {
        let path = SymplecticPath::rotation(3.3, 4).unwrap();
        assert!(matches!(cz_index_sampled(&path, 1e-9), Err(IndexError::SamplingTooCoarse { .. })));
    }

    #[test]
    fn must_start_at_identity() {
        let r = SymplecticPath::new(vec![DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5])], 1e-9);
        assert!(matches!(r, Err(IndexError::NotIdentityStart { .. })));
    }

    #[test]
    fn iterate_of_rotation_matches_longer_rotation() {
        let base = SymplecticPath::rotation(0.3, 100).unwrap();
        for k in 1..=5 {
            let it = base.iterate(k);
            let expected = 2 * ((0.3 * k as f64).floor() as i64) + 1;
            assert_eq!(cz_index_sampled(&it, 1e-9).unwrap(), expected);
        }
    }
}
