//! Persistence barcodes of filtered complexes and the bar-length vanishing check.

use reeb_lab::floer::barcode::{barcode, vanishing_check, write_bars_csv, FilteredComplex, Generator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // three points, three edges, one 2-cell filling the triangle
    let g = |action, degree| Generator { action, degree };
    let complex = FilteredComplex {
        generators: vec![g(0.0, 0), g(0.0, 0), g(0.5, 0), g(1.0, 1), g(2.0, 1), g(3.0, 1), g(4.5, 2)],
        boundary: vec![vec![], vec![], vec![], vec![0, 1], vec![1, 2], vec![2, 0], vec![3, 4, 5]],
    };
    let bars = barcode(&complex)?;
    write_bars_csv(&bars, std::io::stdout())?;
    for c_bar in [1.0, 2.0] {
        let v = vanishing_check(&bars, c_bar, 10.0);
        println!("every bar ending below 10 is shorter than {c_bar}: {} ({} witness(es))", v.ok, v.witnesses.len());
    }
    Ok(())
}
