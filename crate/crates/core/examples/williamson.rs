//! Spectral classification and Williamson normal-form counts of symplectic matrices.

use nalgebra::DMatrix;
use reeb_lab::symplectic::{spectral_classification, williamson_invariants, SymplecticMatrix};

fn shear(c: f64) -> SymplecticMatrix {
    SymplecticMatrix::from_rows(&[vec![1.0, c], vec![0.0, 1.0]], 1e-12).expect("shear is symplectic")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("identity on R^2", SymplecticMatrix::identity(1)),
        ("shear q += p", shear(1.0)),
        ("shear q -= p", shear(-1.0)),
        ("identity ⊕ shear", SymplecticMatrix::identity(1).direct_sum(&shear(1.0))),
    ];
    for (name, a) in &cases {
        let w = williamson_invariants(a, 1e-9)?.invariants;
        println!(
            "{name:<18} nu0 = {} b0 = {} b+ = {} b- = {}  (mu+ shift {}, mu- shift {})",
            w.nu0,
            w.b0,
            w.b_plus,
            w.b_minus,
            w.upper_shift(),
            w.lower_shift()
        );
    }
    let s = DMatrix::from_row_slice(4, 4, &[1.0, 0.3, 0.0, 0.0, 0.3, 2.0, 0.0, 0.0, 0.0, 0.0, 1.5, 0.0, 0.0, 0.0, 0.0, 0.7]);
    let a = SymplecticMatrix::exp_of(&s);
    let report = spectral_classification(&a, 1e-9)?;
    println!("\nexp(J S) spectrum:\n{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
