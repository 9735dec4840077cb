//! Shared oracles for the integration tests.
#![allow(dead_code)]

use rand::Rng;
use reeb_lab::floer::barcode::{FilteredComplex, Generator};

/// Rank over F2 of bit-vectors.
pub fn f2_rank(vectors: impl IntoIterator<Item = u64>) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for mut v in vectors {
        for b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

fn boundary_mask(c: &FilteredComplex, j: usize) -> u64 {
    c.boundary.get(j).map_or(0, |col| col.iter().fold(0u64, |m, i| m ^ (1 << i)))
}

/// Cycles among the degree-`q` generators with action `<= a`, as chain masks.
fn cycles(c: &FilteredComplex, q: i64, a: f64) -> Vec<u64> {
    // reduce columns, remembering which chains produced them
    let mut reduced: Vec<(u64, u64)> = Vec::new();
    let mut kernel = Vec::new();
    for (j, g) in c.generators.iter().enumerate() {
        if g.degree != q || g.action > a {
            continue;
        }
        let (mut col, mut chain) = (boundary_mask(c, j), 1u64 << j);
        while let Some((pc, pch)) = reduced.iter().find(|(r, _)| col != 0 && r.leading_zeros() == col.leading_zeros()) {
            col ^= pc;
            chain ^= pch;
        }
        if col == 0 {
            kernel.push(chain);
        } else {
            reduced.push((col, chain));
        }
    }
    kernel
}

fn boundaries(c: &FilteredComplex, q: i64, b: f64) -> Vec<u64> {
    c.generators
        .iter()
        .enumerate()
        .filter(|(_, g)| g.degree == q + 1 && g.action <= b)
        .map(|(j, _)| boundary_mask(c, j))
        .collect()
}

/// Rank of `H_q(K_a) -> H_q(K_b)` for the sublevel sets `K_a ⊂ K_b`.
pub fn persistent_rank(c: &FilteredComplex, q: i64, a: f64, b: f64) -> usize {
    let z = cycles(c, q, a);
    let bd = boundaries(c, q, b);
    let both = f2_rank(z.iter().chain(&bd).copied());
    both - f2_rank(bd)
}

/// Random filtered simplicial complex on up to four vertices, at most `max_gens` cells.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, max_gens: usize) -> FilteredComplex {
    let nv = rng.random_range(1..=4usize);
    let mut gens: Vec<Generator> = Vec::new();
    let mut boundary: Vec<Vec<usize>> = Vec::new();
    let mut vertex = Vec::new();
    for _ in 0..nv {
        vertex.push(gens.len());
        gens.push(Generator { action: rng.random_range(0..3) as f64, degree: 0 });
        boundary.push(vec![]);
    }
    let mut edges = std::collections::BTreeMap::new();
    for i in 0..nv {
        for j in i + 1..nv {
            if gens.len() < max_gens && rng.random_bool(0.7) {
                let action = gens[vertex[i]].action.max(gens[vertex[j]].action) + rng.random_range(1..3) as f64;
                edges.insert((i, j), gens.len());
                gens.push(Generator { action, degree: 1 });
                boundary.push(vec![vertex[i], vertex[j]]);
            }
        }
    }
    for i in 0..nv {
        for j in i + 1..nv {
            for k in j + 1..nv {
                let (Some(&a), Some(&b), Some(&c)) = (edges.get(&(i, j)), edges.get(&(j, k)), edges.get(&(i, k))) else {
                    continue;
                };
                if gens.len() < max_gens && rng.random_bool(0.6) {
                    let action = gens[a].action.max(gens[b].action).max(gens[c].action) + rng.random_range(1..3) as f64;
                    gens.push(Generator { action, degree: 2 });
                    boundary.push(vec![a, b, c]);
                }
            }
        }
    }
    // shuffle input order, remapping boundary indices
    let n = gens.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    FilteredComplex {
        generators: perm.iter().map(|&old| gens[old]).collect(),
        boundary: perm.iter().map(|&old| boundary[old].iter().map(|i| inv[*i]).collect()).collect(),
    }
}
