//! Index-recurrence search on the ellipsoid E(1, √2) and the dynamically convex gap.

use reeb_lab::ellipsoid::EllipsoidSpec;
use reeb_lab::recurrence::{dynamically_convex_gap, recurrence_search_with, RecurrenceQuery};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = EllipsoidSpec::new(vec![1.0, 2f64.sqrt()])?;
    let profiles = (0..e.n()).map(|j| e.profile(j)).collect::<Result<Vec<_>, _>>()?;
    let query = RecurrenceQuery { count: 5, ..RecurrenceQuery::new(profiles.clone(), 0.1, 3) };
    let outcome = recurrence_search_with(&query, |s| println!("found d = {:>4}, k = {:?}", s.d, s.k))?;
    for s in &outcome.solutions {
        let gap = dynamically_convex_gap(&profiles, s, 1)?;
        println!("d = {}: every certificate passes: {}, μ+(Φ^(k-ℓ)) <= d - 2: {}", s.d, s.certificate.pass, gap.pass);
    }
    println!("scanned k0 up to {}", outcome.scanned_up_to);
    Ok(())
}
