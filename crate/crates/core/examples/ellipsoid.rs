//! Closed-form Reeb dynamics on ellipsoids: periods, profiles, spectrum, convexity.

use reeb_lab::ellipsoid::{convexity_report, ellipsoid_periods, pseudo_rotation_instance, spectrum, EllipsoidSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = EllipsoidSpec::new(vec![1.0, 2f64.sqrt(), 3f64.sqrt()])?;
    let periods = ellipsoid_periods(&e);
    for (j, t) in periods.iter().enumerate() {
        println!("orbit {j}: T = {t:.6}, mean index {:.6}", e.mean_index(j));
    }
    let s = spectrum(&e, 12.0);
    let values: Vec<String> = s.entries.iter().map(|x| format!("{:.4}", x.value)).collect();
    println!("action spectrum up to 12: {}", values.join(", "));
    let c = convexity_report(&e, 100);
    println!("dynamically convex through k = 100: {} (min μ- = {:?})", c.ok, c.min_mu_minus);
    let seed = pseudo_rotation_instance(&EllipsoidSpec::new(vec![1.0, (1.0 + 5f64.sqrt()) / 2.0])?)?;
    println!("E(1, φ) seed: {} orbits, periods {:?}", seed.orbits.len(), seed.orbits.iter().map(|o| o.period).collect::<Vec<_>>());
    Ok(())
}
