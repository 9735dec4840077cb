//! Planar fixed-point indices, Lefschetz bookkeeping and the trace lemma.

use std::f64::consts::{PI, TAU};
use std::io::Read;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Ratio;

/// Bisection depth limit of the adaptive winding computation.
pub const MAX_REFINEMENT_DEPTH: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FixedPointError {
    #[error("fixed point on the sampling circle at ({x}, {y})")]
    FixedPointOnCircle { x: f64, y: f64 },
    #[error("angle step {step:.4} exceeds π/2 between samples {from} and {to}")]
    SamplingTooCoarse { from: usize, to: usize, step: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Sampled points `y` on a circle and their images `φ(y)`, in circular order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarMapSample {
    pub points: Vec<[f64; 2]>,
    pub images: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct SampleRow {
    x: f64,
    y: f64,
    fx: f64,
    fy: f64,
}

impl PlanarMapSample {
    /// `samples` equally spaced points on the circle of radius `epsilon` around `center`.
    pub fn from_map<F: Fn([f64; 2]) -> [f64; 2]>(map: F, center: [f64; 2], epsilon: f64, samples: usize) -> Self {
        let points: Vec<[f64; 2]> = (0..samples).map(|i| circle_point(center, epsilon, TAU * i as f64 / samples as f64)).collect();
        let images = points.iter().map(|p| map(*p)).collect();
        Self { points, images }
    }

    /// CSV with header `x,y,fx,fy`. Rows are put in angular order around their centroid.
    pub fn from_csv<R: Read>(input: R) -> Result<Self, FixedPointError> {
        let mut rows: Vec<SampleRow> = csv::Reader::from_reader(input)
            .deserialize()
            .collect::<Result<_, _>>()
            .map_err(|e| FixedPointError::InvalidInput(e.to_string()))?;
        if rows.len() < 3 {
            return Err(FixedPointError::InvalidInput(format!("{} samples, need at least 3", rows.len())));
        }
        let n = rows.len() as f64;
        let cx = rows.iter().map(|r| r.x).sum::<f64>() / n;
        let cy = rows.iter().map(|r| r.y).sum::<f64>() / n;
        rows.sort_by(|a, b| (a.y - cy).atan2(a.x - cx).total_cmp(&(b.y - cy).atan2(b.x - cx)));
        Ok(Self { points: rows.iter().map(|r| [r.x, r.y]).collect(), images: rows.iter().map(|r| [r.fx, r.fy]).collect() })
    }
}

fn circle_point(center: [f64; 2], epsilon: f64, theta: f64) -> [f64; 2] {
    [center[0] + epsilon * theta.cos(), center[1] + epsilon * theta.sin()]
}

fn displacement(y: [f64; 2], fy: [f64; 2]) -> Result<[f64; 2], FixedPointError> {
    let v = [fy[0] - y[0], fy[1] - y[1]];
    let scale = y[0].abs().max(y[1].abs()).max(fy[0].abs()).max(fy[1].abs()).max(f64::MIN_POSITIVE);
    if v[0].hypot(v[1]) <= 4.0 * f64::EPSILON * scale {
        return Err(FixedPointError::FixedPointOnCircle { x: y[0], y: y[1] });
    }
    Ok(v)
}

/// Signed angle from `u` to `v` in `(-π, π]`.
fn angle_between(u: [f64; 2], v: [f64; 2]) -> f64 {
    (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1])
}

fn winding(total: f64) -> i64 {
    (total / TAU).round() as i64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexReport {
    pub index: i64,
    pub evaluations: usize,
    /// Bisections inserted beyond the initial samples.
    pub refinements: usize,
}

/// Brouwer index of an isolated fixed point `center`: the winding number of
/// `y ↦ φ(y) - y` on the circle of radius `epsilon`. Arcs whose displacement
/// turns by more than π/2 are bisected.
pub fn brouwer_index<F: Fn([f64; 2]) -> [f64; 2]>(
    map: F,
    center: [f64; 2],
    epsilon: f64,
    samples: usize,
) -> Result<IndexReport, FixedPointError> {
    if !(epsilon > 0.0) || samples < 3 {
        return Err(FixedPointError::InvalidInput(format!("need ε > 0 and at least 3 samples, got {epsilon}, {samples}")));
    }
    let eval = |theta: f64| {
        let y = circle_point(center, epsilon, theta);
        displacement(y, map(y))
    };
    let mut evaluations = 0;
    let mut refinements = 0;
    let mut total = 0.0;
    let thetas: Vec<f64> = (0..=samples).map(|i| TAU * i as f64 / samples as f64).collect();
    let mut prev = eval(0.0)?;
    evaluations += 1;
    for (s, w) in thetas.windows(2).enumerate() {
        let end = if s + 1 == samples { eval(0.0)? } else { eval(w[1])? };
        evaluations += 1;
        // explicit stack of (t0, v0, t1, v1, depth)
        let mut stack = vec![(w[0], prev, w[1], end, 0u32)];
        while let Some((t0, v0, t1, v1, depth)) = stack.pop() {
            let step = angle_between(v0, v1);
            if step.abs() <= PI / 2.0 {
                total += step;
                continue;
            }
            if depth >= MAX_REFINEMENT_DEPTH {
                return Err(FixedPointError::SamplingTooCoarse { from: s, to: s + 1, step });
            }
            let tm = 0.5 * (t0 + t1);
            let vm = eval(tm)?;
            evaluations += 1;
            refinements += 1;
            stack.push((tm, vm, t1, v1, depth + 1));
            stack.push((t0, v0, tm, vm, depth + 1));
        }
        prev = end;
    }
    Ok(IndexReport { index: winding(total), evaluations, refinements })
}

/// Winding number of a fixed sample set; fails if adjacent displacements turn by more than π/2.
pub fn brouwer_index_samples(sample: &PlanarMapSample) -> Result<i64, FixedPointError> {
    let n = sample.points.len();
    if n < 3 || sample.images.len() != n {
        return Err(FixedPointError::InvalidInput(format!("{n} points and {} images", sample.images.len())));
    }
    let v: Vec<[f64; 2]> =
        sample.points.iter().zip(&sample.images).map(|(y, fy)| displacement(*y, *fy)).collect::<Result<_, _>>()?;
    let mut total = 0.0;
    for i in 0..n {
        let step = angle_between(v[i], v[(i + 1) % n]);
        if step.abs() > PI / 2.0 {
            return Err(FixedPointError::SamplingTooCoarse { from: i, to: (i + 1) % n, step });
        }
        total += step;
    }
    Ok(winding(total))
}

/// Traces of the induced maps in each degree and the fixed-point indices of `φ^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LefschetzEntry {
    pub m: u64,
    /// `tr(φ̃_q^m)` for `q = 0, 1, ...`.
    pub traces: Vec<i64>,
    pub indices: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LefschetzReport {
    /// `Σ_q (-1)^q tr_q - Σ indices`, per entry.
    pub residuals: Vec<(u64, i64)>,
    pub ok: bool,
}

pub fn lefschetz_check(entries: &[LefschetzEntry]) -> LefschetzReport {
    let residuals: Vec<(u64, i64)> = entries
        .iter()
        .map(|e| {
            let euler: i64 = e.traces.iter().enumerate().map(|(q, t)| if q % 2 == 0 { *t } else { -t }).sum();
            (e.m, euler - e.indices.iter().sum::<i64>())
        })
        .collect();
    let ok = residuals.iter().all(|(_, r)| *r == 0);
    LefschetzReport { residuals, ok }
}

/// `tr(A^m)` for integer chain maps, one per degree.
pub fn chain_traces(maps: &[DMatrix<i64>], m: u64) -> Result<Vec<i64>, FixedPointError> {
    maps.iter()
        .map(|a| {
            if !a.is_square() {
                return Err(FixedPointError::InvalidInput(format!("{}×{} chain map", a.nrows(), a.ncols())));
            }
            let big = a.map(BigInt::from);
            let t = big_power_trace(&big, m);
            i64::try_from(t).map_err(|_| FixedPointError::InvalidInput(format!("trace of power {m} overflows i64")))
        })
        .collect()
}

fn big_mul(a: &DMatrix<BigInt>, b: &DMatrix<BigInt>) -> DMatrix<BigInt> {
    let n = a.nrows();
    DMatrix::from_fn(n, b.ncols(), |i, j| (0..a.ncols()).map(|l| &a[(i, l)] * &b[(l, j)]).sum())
}

fn big_power_trace(a: &DMatrix<BigInt>, m: u64) -> BigInt {
    let mut p = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| BigInt::from((i == j) as i64));
    for _ in 0..m {
        p = big_mul(&p, a);
    }
    (0..a.nrows()).map(|i| p[(i, i)].clone()).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceLemmaReport {
    pub dim: usize,
    pub m_max: u64,
    /// Number of `m ∈ [1, m_max]` with `tr(L^m) >= 0`.
    pub count: u64,
    /// The first few such `m`.
    pub first: Vec<u64>,
    /// `m_max / (2 dim)`, reported only.
    pub heuristic_floor: f64,
    pub exact: bool,
    /// Float traces within rounding of zero (counted as non-negative).
    pub ambiguous: u64,
}

const FIRST_LIST: usize = 16;

/// Scan of `tr(L^m) >= 0` in floating point. Powers are renormalized, so only
/// the sign of the trace is meaningful.
pub fn trace_lemma_check(l: &DMatrix<f64>, m_max: u64) -> Result<TraceLemmaReport, FixedPointError> {
    if !l.is_square() || l.nrows() == 0 || m_max == 0 {
        return Err(FixedPointError::InvalidInput("need a non-empty square matrix and m_max >= 1".into()));
    }
    let dim = l.nrows();
    let mut p = DMatrix::<f64>::identity(dim, dim);
    let (mut count, mut ambiguous, mut first) = (0, 0, Vec::new());
    for m in 1..=m_max {
        p = &p * l;
        let norm = p.norm();
        if norm == 0.0 {
            count += m_max - m + 1;
            first.extend((m..=m_max).take(FIRST_LIST.saturating_sub(first.len())));
            break;
        }
        p /= norm;
        let t = p.trace();
        let tol = 64.0 * f64::EPSILON * dim as f64;
        if t >= -tol {
            count += 1;
            ambiguous += (t.abs() <= tol) as u64;
            if first.len() < FIRST_LIST {
                first.push(m);
            }
        }
    }
    Ok(TraceLemmaReport { dim, m_max, count, first, heuristic_floor: m_max as f64 / (2 * dim) as f64, exact: false, ambiguous })
}

/// Exact scan for a rational matrix, by clearing denominators and using big integers.
pub fn trace_lemma_check_exact(rows: &[Vec<Ratio>], m_max: u64) -> Result<TraceLemmaReport, FixedPointError> {
    let dim = rows.len();
    if dim == 0 || rows.iter().any(|r| r.len() != dim) || m_max == 0 {
        return Err(FixedPointError::InvalidInput("need a non-empty square matrix and m_max >= 1".into()));
    }
    let lcm = rows.iter().flatten().fold(BigInt::from(1), |acc, r| {
        let d = BigInt::from(r.den());
        let g = num_integer::Integer::gcd(&acc, &d);
        acc * d / g
    });
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        let r = rows[i][j];
        BigInt::from(r.num()) * (&lcm / BigInt::from(r.den()))
    });
    let mut p = m.clone();
    let (mut count, mut first) = (0, Vec::new());
    for k in 1..=m_max {
        if k > 1 {
            p = big_mul(&p, &m);
        }
        let t: BigInt = (0..dim).map(|i| p[(i, i)].clone()).sum();
        if !t.is_negative() {
            count += 1;
            if first.len() < FIRST_LIST {
                first.push(k);
            }
        }
    }
    Ok(TraceLemmaReport { dim, m_max, count, first, heuristic_floor: m_max as f64 / (2 * dim) as f64, exact: true, ambiguous: 0 })
}
