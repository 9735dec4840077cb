//! Planar fixed-point indices, Lefschetz residuals and the trace lemma.

use std::f64::consts::TAU;

use reeb_lab::fixed_point::{brouwer_index, lefschetz_check, trace_lemma_check_exact, LefschetzEntry};
use reeb_lab::rational::Ratio;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let theta = TAU * (2f64.sqrt() - 1.0);
    for m in [1u32, 2, 10, 50] {
        let a = theta * m as f64;
        let rot = move |[x, y]: [f64; 2]| [a.cos() * x - a.sin() * y, a.sin() * x + a.cos() * y];
        println!("irrational rotation, iterate {m}: index {}", brouwer_index(rot, [0.0, 0.0], 0.1, 8)?.index);
    }
    let monkey = |[x, y]: [f64; 2]| [x + 2.0 * x * y, y + x * x - y * y];
    let r = brouwer_index(monkey, [0.0, 0.0], 1e-3, 8)?;
    println!("z + i z̄²: index {} after {} refinements", r.index, r.refinements);
    let shift = |[x, y]: [f64; 2]| [x + 1.0, y];
    println!("translation: index {}", brouwer_index(shift, [0.0, 0.0], 0.5, 8)?.index);

    let entries: Vec<LefschetzEntry> =
        (1..=3).map(|m| LefschetzEntry { m, traces: vec![1, -1, 0], indices: vec![1, 1] }).collect();
    println!("Lefschetz residuals: {:?}", lefschetz_check(&entries).residuals);

    let q = |n, d| Ratio::new(n, d).expect("nonzero denominator");
    let rows = vec![vec![q(-1, 2), q(1, 3), q(0, 1)], vec![q(2, 5), q(-1, 1), q(1, 7)], vec![q(0, 1), q(3, 4), q(-2, 3)]];
    let t = trace_lemma_check_exact(&rows, 200)?;
    println!("tr(L^m) >= 0 for {} of m <= 200, first {:?}", t.count, &t.first[..4]);
    Ok(())
}
