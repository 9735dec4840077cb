//! Conley–Zehnder indices of sampled paths and exact iterate indices of profiles.

use nalgebra::DMatrix;
use reeb_lab::index::{cz_index_sampled, index_triple, IterationProfile, SymplecticPath};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for m in 1..=3 {
        let s = DMatrix::<f64>::identity(2 * m, 2 * m) * 0.1;
        let path = SymplecticPath::quadratic_flow(&s, 64)?;
        println!("flow of 0.1 |z|^2/2 on R^{}: CZ = {}", 2 * m, cz_index_sampled(&path, 1e-8)?);
    }
    for rho in [0.3, 1.7, -0.6] {
        let path = SymplecticPath::rotation(rho, 256)?;
        println!("rotation by 2π·{rho}: CZ = {}", cz_index_sampled(&path, 1e-8)?);
    }
    let hyp = SymplecticPath::hyperbolic(2.0, 64)?;
    println!("stretch diag(2, 1/2): CZ = {}", cz_index_sampled(&hyp, 1e-8)?);

    let profile = IterationProfile::elliptic(&[0.25]).with_loop(2);
    println!("\nprofile loop 2 + rotation 1/4:");
    println!("{:>3} {:>5} {:>5} {:>8}", "k", "mu-", "mu+", "mu_hat");
    for k in 1..=8 {
        let t = index_triple(&profile, k);
        println!("{k:>3} {:>5} {:>5} {:>8.3}", t.mu_minus, t.mu_plus, t.mu_hat);
    }
    Ok(())
}
