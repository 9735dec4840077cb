//! Radial Hamiltonian profiles: action functions, A_h(r)/r monotonicity and the transfer map.

use reeb_lab::hamiltonian::{claim1_check, transfer_map, ProfileSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let specs = [
        ("quadratic", ProfileSpec::quadratic(6.0, 2.0)),
        ("cubic θ=0.5", ProfileSpec::cubic(6.0, 2.0, 0.5)),
        ("exponential γ=1", ProfileSpec::exponential(6.0, 2.0, 1.0)),
    ];
    for (name, spec) in specs {
        let h = spec.build()?;
        println!("{name}: slope {}, c = max A_h = {:.6}", h.slope(), h.intercept());
        for t in [1.0, 3.0, 5.0] {
            let (action, r) = h.action_from_period(t)?;
            println!("  T = {t}: level r = {r:.6}, 𝔞_H(T) = {action:.6}");
        }
        match claim1_check(&h, h.r_max()) {
            Ok(c) => println!("  A_h(r)/r nondecreasing on [1, r_max]: {}", c.holds),
            Err(e) => println!("  A_h(r)/r monotonicity not certified: {e}"),
        }
        let k = 3.0;
        let taus: Vec<f64> = (0..5).map(|i| k * h.intercept() * i as f64 / 4.0).collect();
        let f = transfer_map(&h, k, 0.5, &taus)?;
        println!("  transfer k = 3, λ = 0.5: min slack {:.3e}, monotone {}", f.min_slack, f.monotone);
    }
    Ok(())
}
