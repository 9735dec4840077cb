//! Normal-form counts for unipotent symplectic maps.
//!
//! A unipotent `A` is written `A = exp(JQ)` with `Q` symmetric and `X = JQ`
//! nilpotent. The symplectic normal form of `Q` is a sum of
//!
//! * zero blocks on `R^2` (`nu0`),
//! * `Q0 = p1 q2 + ... + p_{d-1} q_d` on `R^{2d}`, `d >= 3` odd (`b0`),
//! * `Q± = ±(Q0 + p_d^2 / 2)` on `R^{2d}` (`b_plus`, `b_minus`).
//!
//! `Q0` with `d = 1` is the zero form on `R^2` and is counted under `nu0`.
//!
//! In terms of `X`: a `Q0` block is a pair of Jordan blocks of odd size `d`, a
//! `Q±` block is a single Jordan block of size `2d`. The sign of a `Q±` block is
//! read off from the form `β(u, w) = uᵀ Q X^{2d-2} w` on the top of the chain,
//! which for the normal form equals `±(-1)^{d-1}` times a positive number.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{max_abs, standard_j, SymplecticError, SymplecticMatrix};

/// Counts of normal-form blocks, plus the eigenvalue-1 multiplicities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WilliamsonInvariants {
    pub nu0: u32,
    pub b0: u32,
    pub b_plus: u32,
    pub b_minus: u32,
    pub nu_g: u32,
    pub nu_a: u32,
    /// Half the dimension of the degenerate factor.
    pub m: u32,
}

impl WilliamsonInvariants {
    /// Invariants of the identity on `R^{2m}`.
    pub fn zero_form(m: u32) -> Self {
        Self { nu0: m, b0: 0, b_plus: 0, b_minus: 0, nu_g: 2 * m, nu_a: m, m }
    }

    /// Invariants of a single block, derived from its normal-form dimension.
    pub fn of_block(form: NormalForm) -> Self {
        let mut w = Self::default();
        match form {
            NormalForm::Zero => {
                w.nu0 = 1;
                w.m = 1;
            }
            NormalForm::Q0(d) => {
                w.b0 = 1;
                w.m = d as u32;
            }
            NormalForm::QPlus(d) => {
                w.b_plus = 1;
                w.m = d as u32;
            }
            NormalForm::QMinus(d) => {
                w.b_minus = 1;
                w.m = d as u32;
            }
        }
        w.nu_g = 2 * (w.b0 + w.nu0) + w.b_plus + w.b_minus;
        w.nu_a = w.m;
        w
    }

    /// Invariants of a symplectic direct sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            nu0: self.nu0 + other.nu0,
            b0: self.b0 + other.b0,
            b_plus: self.b_plus + other.b_plus,
            b_minus: self.b_minus + other.b_minus,
            nu_g: self.nu_g + other.nu_g,
            nu_a: self.nu_a + other.nu_a,
            m: self.m + other.m,
        }
    }

    /// Checks the identities relating the counts and multiplicities.
    pub fn check(&self) -> Result<(), String> {
        let g = 2 * (self.b0 + self.nu0) + self.b_plus + self.b_minus;
        if self.nu_g != g {
            return Err(format!("nu_g = {} but 2(b0+nu0)+b_plus+b_minus = {g}", self.nu_g));
        }
        if self.nu_g > 2 * self.nu_a || self.nu_a > self.m {
            return Err(format!("need nu_g/2 <= nu_a <= m, got nu_g={}, nu_a={}, m={}", self.nu_g, self.nu_a, self.m));
        }
        if self.nu_a < self.nu0 + self.b0 + self.b_plus + self.b_minus {
            return Err(format!("nu_a = {} is below nu0+b0+b_plus+b_minus", self.nu_a));
        }
        Ok(())
    }

    /// `b0 + b_plus + nu0`, the upward shift of `mu_+` over the mean index.
    pub fn upper_shift(&self) -> i64 {
        (self.b0 + self.b_plus + self.nu0) as i64
    }

    /// `b0 + b_minus + nu0`, the downward shift of `mu_-` below the mean index.
    pub fn lower_shift(&self) -> i64 {
        (self.b0 + self.b_minus + self.nu0) as i64
    }
}

/// One normal-form block. `d` is the half-dimension of the block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalForm {
    Zero,
    Q0(usize),
    QPlus(usize),
    QMinus(usize),
}

impl NormalForm {
    pub fn dim_half(&self) -> usize {
        match *self {
            NormalForm::Zero => 1,
            NormalForm::Q0(d) | NormalForm::QPlus(d) | NormalForm::QMinus(d) => d,
        }
    }

    /// Hessian of the quadratic form in `(q, p)` coordinates, so that the form is `½ zᵀ S z`.
    pub fn hessian(&self) -> DMatrix<f64> {
        let d = self.dim_half();
        let mut s = DMatrix::zeros(2 * d, 2 * d);
        let chain = |s: &mut DMatrix<f64>| {
            for i in 0..d.saturating_sub(1) {
                // p_i q_{i+1}
                s[(d + i, i + 1)] = 1.0;
                s[(i + 1, d + i)] = 1.0;
            }
        };
        match *self {
            NormalForm::Zero => {}
            NormalForm::Q0(_) => chain(&mut s),
            NormalForm::QPlus(_) | NormalForm::QMinus(_) => {
                chain(&mut s);
                s[(2 * d - 1, 2 * d - 1)] = 1.0;
                if matches!(self, NormalForm::QMinus(_)) {
                    s = -s;
                }
            }
        }
        s
    }

    /// Hessian of a direct sum of blocks, in `(q, p)` order.
    pub fn direct_sum(forms: &[NormalForm]) -> DMatrix<f64> {
        forms
            .iter()
            .map(|f| f.hessian())
            .reduce(|a, b| super::direct_sum_qp(&a, &b))
            .unwrap_or_else(|| DMatrix::zeros(0, 0))
    }
}

/// Full output of [`williamson_invariants`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WilliamsonReport {
    pub invariants: WilliamsonInvariants,
    /// Number of Jordan blocks of `JQ` of each size `1..=2m` (index 0 is size 1).
    pub jordan_counts: Vec<usize>,
    /// `|(A - I)^{2m}|`, which must vanish for a unipotent map.
    pub nilpotency_residual: f64,
    /// `|Q - Qᵀ| / |Q|` for the logarithm.
    pub symmetry_residual: f64,
    /// Set when size-1 blocks were found; they are reported under `nu0`.
    pub merged_unit_q0: bool,
}

/// `Q = -J log A` for unipotent `A`, via the finite series of `log(I + N)`.
/// Returns `(Q, nilpotency residual, symmetry residual)`.
pub fn unipotent_log(a: &SymplecticMatrix, tol: f64) -> Result<(DMatrix<f64>, f64, f64), SymplecticError> {
    let dim = 2 * a.dim_half();
    let n = a.matrix() - DMatrix::identity(dim, dim);
    let scale = max_abs(&n).max(1.0);
    let mut powers = vec![n.clone()];
    for _ in 1..dim {
        let next = powers.last().unwrap() * &n;
        powers.push(next);
    }
    let top = max_abs(powers.last().unwrap()) / scale.powi(dim as i32);
    if top > tol {
        return Err(SymplecticError::NotUnipotent { power: dim, residual: top });
    }
    let mut log = DMatrix::zeros(dim, dim);
    for (i, p) in powers.iter().enumerate() {
        let k = (i + 1) as f64;
        if max_abs(p) <= tol * scale.powi(i as i32 + 1) {
            break;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        log += p * (sign / k);
    }
    let q = standard_j(a.dim_half()).transpose() * log;
    let asym = max_abs(&(&q - q.transpose())) / max_abs(&q).max(1.0);
    if asym > tol.sqrt() {
        return Err(SymplecticError::UnresolvedNormalForm {
            reason: "logarithm is not symmetric".into(),
            residual: asym,
        });
    }
    Ok(((&q + q.transpose()) * 0.5, top, asym))
}

/// Classifies a unipotent symplectic map.
pub fn williamson_invariants(a: &SymplecticMatrix, tol: f64) -> Result<WilliamsonReport, SymplecticError> {
    let (q, top, asym) = unipotent_log(a, tol)?;
    let (invariants, jordan_counts) = classify(&q, tol)?;
    Ok(WilliamsonReport {
        merged_unit_q0: jordan_counts.first().copied().unwrap_or(0) > 0,
        invariants,
        jordan_counts,
        nilpotency_residual: top,
        symmetry_residual: asym,
    })
}

/// Classifies a symmetric `Q` with `JQ` nilpotent.
pub fn invariants_from_form(q: &DMatrix<f64>, tol: f64) -> Result<WilliamsonInvariants, SymplecticError> {
    classify(q, tol).map(|(w, _)| w)
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Rank with a gray-zone check: values within three decades of the threshold
/// on either side make the answer ambiguous.
fn robust_rank(m: &DMatrix<f64>, thr: f64) -> Result<usize, SymplecticError> {
    let sv = singular_values(m);
    if let Some(s) = sv.iter().find(|s| **s > thr * 1e-3 && **s < thr * 1e3) {
        return Err(SymplecticError::UnresolvedNormalForm {
            reason: format!("singular value {s:.3e} is within the ambiguity band around {thr:.3e}"),
            residual: *s,
        });
    }
    Ok(sv.iter().filter(|s| **s > thr).count())
}

fn kernel_basis(m: &DMatrix<f64>, thr: f64) -> DMatrix<f64> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let rows: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] <= thr).collect();
    // Rank-deficient SVDs of square matrices return n singular values.
    DMatrix::from_fn(n, rows.len(), |r, c| vt[(rows[c], r)])
}

fn classify(q: &DMatrix<f64>, tol: f64) -> Result<(WilliamsonInvariants, Vec<usize>), SymplecticError> {
    let dim = q.nrows();
    if dim == 0 || dim % 2 == 1 || q.ncols() != dim {
        return Err(SymplecticError::OddDimension(dim));
    }
    let m = dim / 2;
    let x = standard_j(m) * q;
    let scale = max_abs(&x).max(1.0);

    let mut ranks = vec![dim];
    let mut powers = vec![DMatrix::identity(dim, dim)];
    for k in 1..=dim + 1 {
        let p = powers.last().unwrap() * &x;
        let thr = tol * scale.powi(k as i32);
        let r = if k > dim { 0 } else { robust_rank(&p, thr)? };
        ranks.push(r);
        powers.push(p);
    }
    if ranks[dim] != 0 {
        return Err(SymplecticError::NotUnipotent {
            power: dim,
            residual: max_abs(&powers[dim]) / scale.powi(dim as i32),
        });
    }
    // n_s = (r_{s-1} - r_s) - (r_s - r_{s+1})
    let counts: Vec<usize> = (1..=dim)
        .map(|s| {
            let a = ranks[s - 1] as i64 - ranks[s] as i64;
            let b = ranks[s] as i64 - ranks[s + 1] as i64;
            (a - b).max(0) as usize
        })
        .collect();

    let mut w = WilliamsonInvariants { m: m as u32, nu_a: m as u32, ..Default::default() };
    for (idx, &n_s) in counts.iter().enumerate() {
        let s = idx + 1;
        if n_s == 0 {
            continue;
        }
        if s % 2 == 1 {
            if n_s % 2 == 1 {
                return Err(SymplecticError::UnresolvedNormalForm {
                    reason: format!("odd number ({n_s}) of Jordan blocks of odd size {s}"),
                    residual: 0.0,
                });
            }
            if s == 1 {
                w.nu0 += (n_s / 2) as u32;
            } else {
                w.b0 += (n_s / 2) as u32;
            }
            continue;
        }
        let kernel = kernel_basis(&powers[s], tol * scale.powi(s as i32));
        let g = kernel.transpose() * q * &powers[s - 2] * &kernel;
        let g = (&g + g.transpose()) * 0.5;
        let eig = SymmetricEigen::new(g.clone()).eigenvalues;
        let gscale = max_abs(&g).max(f64::MIN_POSITIVE);
        let thr = tol.sqrt() * gscale.max(1.0);
        let pos = eig.iter().filter(|e| **e > thr).count();
        let neg = eig.iter().filter(|e| **e < -thr).count();
        if pos + neg != n_s {
            return Err(SymplecticError::UnresolvedNormalForm {
                reason: format!("top form for size {s} has rank {} but {n_s} blocks", pos + neg),
                residual: eig.iter().map(|e| e.abs()).filter(|e| *e <= thr).fold(0.0, f64::max),
            });
        }
        let d = s / 2;
        let (plus, minus) = if d % 2 == 1 { (pos, neg) } else { (neg, pos) };
        w.b_plus += plus as u32;
        w.b_minus += minus as u32;
    }
    let nu_g = dim - ranks[1];
    w.nu_g = nu_g as u32;
    w.check().map_err(|reason| SymplecticError::UnresolvedNormalForm { reason, residual: 0.0 })?;
    Ok((w, counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{validate_symplectic, DEFAULT_TOL};

    fn classify_forms(forms: &[NormalForm]) -> WilliamsonInvariants {
        let s = NormalForm::direct_sum(forms);
        let a = SymplecticMatrix::exp_of(&s);
        williamson_invariants(&a, DEFAULT_TOL).unwrap().invariants
    }

    #[test]
    fn identity_is_all_zero_blocks() {
        let w = williamson_invariants(&SymplecticMatrix::identity(2), DEFAULT_TOL).unwrap();
        assert_eq!(w.invariants, WilliamsonInvariants::zero_form(2));
        assert!(w.merged_unit_q0);
    }

    #[test]
    fn shears_have_signs() {
        let plus = classify_forms(&[NormalForm::QPlus(1)]);
        assert_eq!((plus.b_plus, plus.b_minus, plus.nu_g, plus.nu_a), (1, 0, 1, 1));
        let minus = classify_forms(&[NormalForm::QMinus(1)]);
        assert_eq!((minus.b_plus, minus.b_minus), (0, 1));
    }

    #[test]
    fn every_single_block_matches_its_label() {
        for form in [
            NormalForm::Zero,
            NormalForm::Q0(3),
            NormalForm::Q0(5),
            NormalForm::QPlus(2),
            NormalForm::QMinus(2),
            NormalForm::QPlus(3),
            NormalForm::QMinus(3),
            NormalForm::QPlus(4),
        ] {
            assert_eq!(classify_forms(&[form]), WilliamsonInvariants::of_block(form), "{form:?}");
        }
    }

    #[test]
    fn sums_add_up() {
        let forms = [NormalForm::QPlus(1), NormalForm::QMinus(2), NormalForm::Zero, NormalForm::Q0(3)];
        let expected = forms
            .iter()
            .map(|f| WilliamsonInvariants::of_block(*f))
            .reduce(|a, b| a.direct_sum(&b))
            .unwrap();
        assert_eq!(classify_forms(&forms), expected);
    }

    #[test]
    fn scaling_q_preserves_invariants() {
        let s = NormalForm::direct_sum(&[NormalForm::QPlus(2), NormalForm::QMinus(1)]);
        let base = invariants_from_form(&s, DEFAULT_TOL).unwrap();
        for k in [0.5, 2.0, 7.0] {
            assert_eq!(invariants_from_form(&(&s * k), DEFAULT_TOL).unwrap(), base);
        }
    }

    #[test]
    fn rejects_non_unipotent() {
        let r = SymplecticMatrix::rotation(0.5);
        assert!(matches!(williamson_invariants(&r, DEFAULT_TOL), Err(SymplecticError::NotUnipotent { .. })));
    }

    #[test]
    fn shear_matrix_input() {
        let a = validate_symplectic(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]), DEFAULT_TOL).unwrap();
        let w = williamson_invariants(&a, DEFAULT_TOL).unwrap().invariants;
        assert_eq!(w.nu_g, 1);
        assert_eq!(w.b_plus + w.b_minus, 1);
    }

    #[test]
    fn invariant_check_catches_bad_counts() {
        let bad = WilliamsonInvariants { nu0: 1, nu_g: 1, nu_a: 1, m: 1, ..Default::default() };
        assert!(bad.check().is_err());
    }
}
