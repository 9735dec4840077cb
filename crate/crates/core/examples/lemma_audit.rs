//! Arrow-exclusion audits: hyperbolic z with E(1, √2) companions, and E(1, φ) in pseudo-rotation mode.

use reeb_lab::audit::{audit, AuditMode, OrbitSpec, OrbitSystem, OrbitSystemSpec, SearchRange};
use reeb_lab::ellipsoid::{ellipsoid_periods, pseudo_rotation_instance, EllipsoidSpec};
use reeb_lab::hamiltonian::ProfileSpec;
use reeb_lab::index::IterationProfile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = EllipsoidSpec::new(vec![1.0, 2f64.sqrt()])?;
    let periods = ellipsoid_periods(&e);
    let mut orbits =
        vec![OrbitSpec { period: 3.0, profile: IterationProfile::hyperbolic(&[3]), hyperbolic: true, locally_maximal: false }];
    for (j, &period) in periods.iter().enumerate() {
        orbits.push(OrbitSpec { period, profile: e.profile(j)?, hyperbolic: false, locally_maximal: false });
    }
    let spec = OrbitSystemSpec {
        n: 2,
        orbits,
        hamiltonian: ProfileSpec::quadratic(6.0, 2.0),
        sigma: 0.5,
        eta: 0.1,
        ell0: 3,
        c_bar: 0.5,
        b: Some(5.0),
    };
    let report = audit(&OrbitSystem::new(spec)?, AuditMode::TheoremA, SearchRange::default())?;
    print!("{}", report.summary());

    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let seed = pseudo_rotation_instance(&EllipsoidSpec::new(vec![1.0, phi])?)?;
    let spec = OrbitSystemSpec::from_seed(&seed, 0, ProfileSpec::quadratic(8.0, 2.0), 0.5, 0.05, 0.5);
    let report = audit(&OrbitSystem::new(spec)?, AuditMode::TheoremB, SearchRange::default())?;
    print!("\n{}", report.summary());
    for s in &report.solutions {
        println!("d = {}: μ̂(z^k) - d = {:+.4}, protected {:?}", s.d, s.mean_index_offset, s.protected);
    }
    Ok(())
}
