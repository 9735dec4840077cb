//! Reduced Floer graphs and filtered complexes over F2.
//!
//! Graphs and complexes are input data; this module validates and measures them.

pub mod barcode;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use barcode::{barcode, barcodes, vanishing_check, write_bars_csv, Bar, FilteredComplex, Generator, VanishingReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FloerError {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("malformed complex: {0}")]
    MalformedComplex(String),
    #[error("boundary does not square to zero: ∂∂ of generator {generator} is nonzero")]
    NotADifferential { generator: usize },
    #[error("boundary of generator {generator} (action {action}) hits generator {target} (action {target_action})")]
    FiltrationViolation { generator: usize, action: f64, target: usize, target_action: f64 },
}

/// A vertex of a reduced Floer graph. Orbit vertices carry `orbit` and
/// `iterate`; the domain vertex carries neither and has mean index 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vertex {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterate: Option<u64>,
    pub action: f64,
    #[serde(default)]
    pub mean_index: f64,
    /// Degree support `[lo, hi]` of the local homology.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<[i64; 2]>,
    /// Local homology ranks by degree. For the domain vertex these are the
    /// ranks of `H(W, ∂W)` in their own grading; see [`Vertex::degree_ranks`].
    #[serde(default)]
    pub ranks: BTreeMap<i64, u32>,
}

impl Vertex {
    pub fn orbit(orbit: usize, iterate: u64, action: f64, mean_index: f64) -> Self {
        Self { orbit: Some(orbit), iterate: Some(iterate), action, mean_index, support: None, ranks: BTreeMap::new() }
    }

    pub fn domain(action: f64, relative_ranks: BTreeMap<i64, u32>) -> Self {
        Self { orbit: None, iterate: None, action, mean_index: 0.0, support: None, ranks: relative_ranks }
    }

    pub fn with_support(mut self, lo: i64, hi: i64) -> Self {
        self.support = Some([lo, hi]);
        self
    }

    pub fn is_domain(&self) -> bool {
        self.orbit.is_none()
    }

    /// Ranks in Floer degree: the domain vertex is shifted down by `n`.
    pub fn degree_ranks(&self, n: usize) -> BTreeMap<i64, u32> {
        let shift = if self.is_domain() { n as i64 } else { 0 };
        self.ranks.iter().filter(|(_, r)| **r > 0).map(|(d, r)| (d - shift, *r)).collect()
    }

    /// Degrees carrying homology: the declared support, else the nonzero ranks.
    fn degree_range(&self, n: usize) -> Option<(i64, i64)> {
        if let Some([lo, hi]) = self.support {
            return Some((lo, hi));
        }
        let r = self.degree_ranks(n);
        Some((*r.keys().next()?, *r.keys().next_back()?))
    }
}

/// An arrow lowers the degree by one and the action by `length`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
    pub length: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedFloerGraph {
    pub vertices: Vec<Vertex>,
    #[serde(default)]
    pub arrows: Vec<Arrow>,
}

impl ReducedFloerGraph {
    /// Adds an arrow whose length is the action difference.
    pub fn connect(&mut self, source: usize, target: usize) {
        let length = self.vertices[source].action - self.vertices[target].action;
        self.arrows.push(Arrow { source, target, length });
    }

    pub fn from_json(s: &str) -> Result<Self, FloerError> {
        let g: Self = serde_json::from_str(s).map_err(|e| FloerError::MalformedGraph(e.to_string()))?;
        g.check_well_formed()?;
        Ok(g)
    }

    fn check_well_formed(&self) -> Result<(), FloerError> {
        let bad = |m: String| Err(FloerError::MalformedGraph(m));
        let mut domains = 0;
        for (i, v) in self.vertices.iter().enumerate() {
            if v.orbit.is_some() != v.iterate.is_some() {
                return bad(format!("vertex {i}: orbit and iterate must be given together"));
            }
            if v.iterate == Some(0) {
                return bad(format!("vertex {i}: iterate must be positive"));
            }
            if !(v.action.is_finite() && v.mean_index.is_finite()) {
                return bad(format!("vertex {i}: non-finite action or mean index"));
            }
            if let Some([lo, hi]) = v.support {
                if lo > hi {
                    return bad(format!("vertex {i}: empty support [{lo}, {hi}]"));
                }
            }
            if v.is_domain() {
                domains += 1;
                if v.mean_index != 0.0 {
                    return bad(format!("vertex {i}: the domain vertex has mean index 0"));
                }
            }
        }
        if domains > 1 {
            return bad(format!("{domains} domain vertices, at most one allowed"));
        }
        for (a, arrow) in self.arrows.iter().enumerate() {
            let n = self.vertices.len();
            if arrow.source >= n || arrow.target >= n {
                return bad(format!("arrow {a} references a missing vertex"));
            }
            if arrow.source == arrow.target {
                return bad(format!("arrow {a} is a loop"));
            }
            if !arrow.length.is_finite() {
                return bad(format!("arrow {a} has non-finite length"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    /// Arrows strictly decrease the action.
    NonPositive { length: f64 },
    /// The stored length differs from the action difference.
    LengthMismatch { length: f64, expected: f64 },
    /// Mean indices further apart than `2n`.
    MeanIndexGap { gap: f64, limit: f64 },
    /// An arrow of length at most `σ` at a protected vertex.
    ShortProtected { vertex: usize, length: f64, sigma: f64 },
    /// No degree `d` of the source with `d - 1` in the target.
    DegreeSupport { source: [i64; 2], target: [i64; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub arrow: usize,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GraphCheckOptions {
    pub check_degrees: bool,
}

/// Lists every arrow violating positivity, the length identity, the `2n`
/// mean-index rule or the `σ` bound at a protected orbit (`orbit -> σ`).
pub fn validate_graph(
    graph: &ReducedFloerGraph,
    n: usize,
    protected: &BTreeMap<usize, f64>,
    options: GraphCheckOptions,
) -> Result<Vec<Violation>, FloerError> {
    graph.check_well_formed()?;
    let limit = 2.0 * n as f64;
    let mut out = Vec::new();
    for (a, arrow) in graph.arrows.iter().enumerate() {
        let s = &graph.vertices[arrow.source];
        let t = &graph.vertices[arrow.target];
        let mut push = |kind| out.push(Violation { arrow: a, kind });
        if !(arrow.length > 0.0) {
            push(ViolationKind::NonPositive { length: arrow.length });
        }
        let expected = s.action - t.action;
        if (arrow.length - expected).abs() > 1e-12 * s.action.abs().max(t.action.abs()).max(1.0) {
            push(ViolationKind::LengthMismatch { length: arrow.length, expected });
        }
        let gap = (s.mean_index - t.mean_index).abs();
        if gap > limit {
            push(ViolationKind::MeanIndexGap { gap, limit });
        }
        for (vertex, v) in [(arrow.source, s), (arrow.target, t)] {
            if let Some(&sigma) = v.orbit.and_then(|o| protected.get(&o)) {
                if arrow.length <= sigma {
                    push(ViolationKind::ShortProtected { vertex, length: arrow.length, sigma });
                }
            }
        }
        if options.check_degrees {
            if let (Some(ss), Some(ts)) = (s.degree_range(n), t.degree_range(n)) {
                if ss.1 - 1 < ts.0 || ss.0 - 1 > ts.1 {
                    push(ViolationKind::DegreeSupport { source: [ss.0, ss.1], target: [ts.0, ts.1] });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph() {
        let g = ReducedFloerGraph::default();
        assert!(validate_graph(&g, 2, &BTreeMap::new(), GraphCheckOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn short_arrow_into_protected() {
        let sigma = 0.4;
        let mut g = ReducedFloerGraph {
            vertices: vec![Vertex::orbit(1, 2, 5.0 + sigma / 2.0, 4.0), Vertex::orbit(0, 3, 5.0, 4.5)],
            arrows: vec![],
        };
        g.connect(0, 1);
        let protected = BTreeMap::from([(0, sigma)]);
        let v = validate_graph(&g, 2, &protected, GraphCheckOptions::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0].kind, ViolationKind::ShortProtected { vertex: 1, .. }));
    }

    #[test]
    fn mean_index_gap() {
        let n = 2;
        let mut g = ReducedFloerGraph {
            vertices: vec![Vertex::orbit(0, 1, 3.0, 2.0 * n as f64 + 3.0), Vertex::orbit(1, 1, 1.0, 0.0)],
            arrows: vec![],
        };
        g.connect(0, 1);
        let v = validate_graph(&g, n, &BTreeMap::new(), GraphCheckOptions::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0].kind, ViolationKind::MeanIndexGap { gap, limit } if gap == 7.0 && limit == 4.0));
    }

    #[test]
    fn positivity_length_and_degrees() {
        let g = ReducedFloerGraph {
            vertices: vec![
                Vertex::orbit(0, 1, 1.0, 3.0).with_support(3, 4),
                Vertex::orbit(1, 1, 2.0, 3.0).with_support(5, 5),
                Vertex::domain(0.0, BTreeMap::from([(4, 1)])),
            ],
            arrows: vec![Arrow { source: 0, target: 1, length: -1.0 }, Arrow { source: 1, target: 2, length: 1.5 }],
        };
        let v = validate_graph(&g, 2, &BTreeMap::new(), GraphCheckOptions { check_degrees: true }).unwrap();
        assert_eq!(v.len(), 4);
        assert!(matches!(v[0], Violation { arrow: 0, kind: ViolationKind::NonPositive { .. } }));
        assert!(matches!(v[1], Violation { arrow: 0, kind: ViolationKind::DegreeSupport { .. } }));
        assert!(matches!(v[2], Violation { arrow: 1, kind: ViolationKind::LengthMismatch { expected, .. } } if expected == 2.0));
        // the domain sits in degree 4 - 2 = 2, below 5 - 1
        assert!(matches!(v[3], Violation { arrow: 1, kind: ViolationKind::DegreeSupport { target: [2, 2], .. } }));
        assert_eq!(g.vertices[2].degree_ranks(2), BTreeMap::from([(2, 1)]));
        let plain = validate_graph(&g, 2, &BTreeMap::new(), GraphCheckOptions::default()).unwrap();
        assert_eq!(plain.len(), 2);
    }

    #[test]
    fn malformed() {
        let bad = r#"{"vertices": [{"action": 1.0}, {"action": 0.0}], "arrows": []}"#;
        assert!(matches!(ReducedFloerGraph::from_json(bad), Err(FloerError::MalformedGraph(_))));
        let dangling = r#"{"vertices": [{"orbit": 0, "iterate": 1, "action": 1.0}], "arrows": [{"source": 0, "target": 3, "length": 1.0}]}"#;
        assert!(matches!(ReducedFloerGraph::from_json(dangling), Err(FloerError::MalformedGraph(_))));
    }
}
