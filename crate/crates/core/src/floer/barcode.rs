//! Persistence barcodes of action-filtered complexes over F2 by column reduction.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FloerError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub action: f64,
    pub degree: i64,
}

/// Generators with a sparse F2 boundary: `boundary[j]` lists the generators in `∂g_j`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilteredComplex {
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub boundary: Vec<Vec<usize>>,
}

impl FilteredComplex {
    pub fn from_json(s: &str) -> Result<Self, FloerError> {
        serde_json::from_str(s).map_err(|e| FloerError::MalformedComplex(e.to_string()))
    }

    /// `∂g_j` as a sorted set with repeated entries cancelled.
    fn column(&self, j: usize) -> Vec<usize> {
        let mut c = self.boundary.get(j).cloned().unwrap_or_default();
        c.sort_unstable();
        let mut out: Vec<usize> = Vec::with_capacity(c.len());
        for i in c {
            if out.last() == Some(&i) {
                out.pop();
            } else {
                out.push(i);
            }
        }
        out
    }

    /// Checks indices, degrees, strict action decrease and `∂² = 0`.
    pub fn validate(&self) -> Result<(), FloerError> {
        let n = self.generators.len();
        if self.boundary.len() > n {
            return Err(FloerError::MalformedComplex(format!("{} boundary columns for {n} generators", self.boundary.len())));
        }
        if let Some(i) = self.generators.iter().position(|g| !g.action.is_finite()) {
            return Err(FloerError::MalformedComplex(format!("generator {i} has non-finite action")));
        }
        for j in 0..n {
            let g = self.generators[j];
            for i in self.column(j) {
                let Some(t) = self.generators.get(i) else {
                    return Err(FloerError::MalformedComplex(format!("generator {j} has boundary entry {i} out of range")));
                };
                if t.degree != g.degree - 1 {
                    return Err(FloerError::MalformedComplex(format!(
                        "∂ of generator {j} (degree {}) hits degree {}",
                        g.degree, t.degree
                    )));
                }
                if !(t.action < g.action) {
                    return Err(FloerError::FiltrationViolation {
                        generator: j,
                        action: g.action,
                        target: i,
                        target_action: t.action,
                    });
                }
            }
        }
        for j in 0..n {
            let mut acc: Vec<usize> = Vec::new();
            for i in self.column(j) {
                acc = sym_diff(&acc, &self.column(i));
            }
            if !acc.is_empty() {
                return Err(FloerError::NotADifferential { generator: j });
            }
        }
        Ok(())
    }
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A bar `[birth, death)` in `degree`; `death = ∞` for essential classes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub birth: f64,
    #[serde(with = "death_serde")]
    pub death: f64,
    pub degree: i64,
}

mod death_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad death value {s:?}"))),
        }
    }
}

impl Bar {
    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    fn cmp_key(&self, other: &Self) -> std::cmp::Ordering {
        self.degree
            .cmp(&other.degree)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// Barcode by standard column reduction. Generators are ordered by action,
/// ties by input index; bars are returned sorted by degree, birth, death.
pub fn barcode(complex: &FilteredComplex) -> Result<Vec<Bar>, FloerError> {
    complex.validate()?;
    let n = complex.generators.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| complex.generators[*a].action.total_cmp(&complex.generators[*b].action).then(a.cmp(b)));
    let mut pos = vec![0; n];
    for (p, &g) in order.iter().enumerate() {
        pos[g] = p;
    }
    let mut columns: Vec<Vec<usize>> = order
        .iter()
        .map(|&g| {
            let mut c: Vec<usize> = complex.column(g).iter().map(|i| pos[*i]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    let mut pivot_of: Vec<Option<usize>> = vec![None; n];
    let mut paired = vec![false; n];
    let mut bars = Vec::new();
    for j in 0..n {
        while let Some(&low) = columns[j].last() {
            match pivot_of[low] {
                Some(prev) => columns[j] = sym_diff(&columns[j], &columns[prev]),
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            pivot_of[low] = Some(j);
            paired[low] = true;
            paired[j] = true;
            let born = complex.generators[order[low]];
            bars.push(Bar { birth: born.action, death: complex.generators[order[j]].action, degree: born.degree });
        }
    }
    for p in 0..n {
        if !paired[p] {
            let g = complex.generators[order[p]];
            bars.push(Bar { birth: g.action, death: f64::INFINITY, degree: g.degree });
        }
    }
    bars.sort_by(Bar::cmp_key);
    Ok(bars)
}

/// Barcodes of several complexes, computed concurrently, in input order.
pub fn barcodes(complexes: &[FilteredComplex]) -> Vec<Result<Vec<Bar>, FloerError>> {
    complexes.par_iter().map(barcode).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingReport {
    pub ok: bool,
    pub c_bar: f64,
    pub level: f64,
    /// Bars ending at or below `level` with length at least `c_bar`.
    pub witnesses: Vec<Bar>,
}

/// True iff every bar with `death <= level` is shorter than `c_bar`.
pub fn vanishing_check(bars: &[Bar], c_bar: f64, level: f64) -> VanishingReport {
    let witnesses: Vec<Bar> = bars.iter().filter(|b| b.death <= level && b.length() >= c_bar).copied().collect();
    VanishingReport { ok: witnesses.is_empty(), c_bar, level, witnesses }
}

/// CSV with header `birth,death,degree`; essential bars die at `inf`.
pub fn write_bars_csv<W: Write>(bars: &[Bar], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["birth", "death", "degree"])?;
    for b in bars {
        let death = if b.is_essential() { "inf".to_string() } else { b.death.to_string() };
        w.write_record([b.birth.to_string(), death, b.degree.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(action: f64, degree: i64) -> Generator {
        Generator { action, degree }
    }

    #[test]
    fn single_pair() {
        let c = FilteredComplex { generators: vec![g(1.0, 3), g(0.0, 2)], boundary: vec![vec![1], vec![]] };
        assert_eq!(barcode(&c).unwrap(), vec![Bar { birth: 0.0, death: 1.0, degree: 2 }]);
    }

    #[test]
    fn no_differential() {
        let c = FilteredComplex { generators: vec![g(1.0, 0), g(2.0, 1), g(0.5, 1)], boundary: vec![] };
        let bars = barcode(&c).unwrap();
        assert_eq!(bars.len(), 3);
        assert!(bars.iter().all(Bar::is_essential));
    }

    #[test]
    fn triangle() {
        // vertices a, b, c at 0, edges ab, bc, ca at 1, 2, 3
        let c = FilteredComplex {
            generators: vec![g(0.0, 0), g(0.0, 0), g(0.0, 0), g(1.0, 1), g(2.0, 1), g(3.0, 1)],
            boundary: vec![vec![], vec![], vec![], vec![0, 1], vec![1, 2], vec![2, 0]],
        };
        let bars = barcode(&c).unwrap();
        assert_eq!(
            bars,
            vec![
                Bar { birth: 0.0, death: 1.0, degree: 0 },
                Bar { birth: 0.0, death: 2.0, degree: 0 },
                Bar { birth: 0.0, death: f64::INFINITY, degree: 0 },
                Bar { birth: 3.0, death: f64::INFINITY, degree: 1 },
            ]
        );
    }

    #[test]
    fn rejects_bad_complexes() {
        let up = FilteredComplex { generators: vec![g(0.0, 1), g(1.0, 0)], boundary: vec![vec![1], vec![]] };
        assert!(matches!(barcode(&up), Err(FloerError::FiltrationViolation { .. })));
        let sq = FilteredComplex {
            generators: vec![g(2.0, 2), g(1.0, 1), g(0.0, 0)],
            boundary: vec![vec![1], vec![2], vec![]],
        };
        assert!(matches!(barcode(&sq), Err(FloerError::NotADifferential { generator: 0 })));
    }

    #[test]
    fn vanishing() {
        let bars = [Bar { birth: 0.0, death: 1.0, degree: 0 }, Bar { birth: 2.0, death: 2.5, degree: 0 }];
        assert!(vanishing_check(&bars, 1.5, 10.0).ok);
        let long = [Bar { birth: 0.0, death: 3.0, degree: 1 }];
        let r = vanishing_check(&long, 2.0, 10.0);
        assert!(!r.ok && r.witnesses == long.to_vec());
        let inf = [Bar { birth: 0.0, death: f64::INFINITY, degree: 1 }];
        assert!(vanishing_check(&inf, 2.0, 10.0).ok);
    }

    #[test]
    fn csv_and_json_use_inf() {
        let bars = [Bar { birth: 0.5, death: f64::INFINITY, degree: 2 }];
        let mut buf = Vec::new();
        write_bars_csv(&bars, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "birth,death,degree\n0.5,inf,2\n");
        let js = serde_json::to_string(&bars[0]).unwrap();
        assert_eq!(js, r#"{"birth":0.5,"death":"inf","degree":2}"#);
        assert_eq!(serde_json::from_str::<Bar>(&js).unwrap(), bars[0]);
    }
}
