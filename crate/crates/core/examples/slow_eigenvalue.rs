// Slow eigenvalue of the coupled patch system for one profile, with and
// without the ensemble, against the complete-domain value.

use patchdyn::lattice::DiffusivityProfile;
use patchdyn::patch::{slow_eigenvalue, CouplingSpec, PatchGeometry};
use patchdyn::theory::{lambda0_quadratic, SymbolValue};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let profile = DiffusivityProfile::new(vec![1.0, 2.0, 4.0])?;
    let geom = PatchGeometry::new(5, 2, 1.0, 12)?;
    let spec = CouplingSpec::default();
    println!("r = {:.4}, core {:?}", geom.r(), geom.core());
    for theta in [0.4, 0.2, 0.1] {
        let s = SymbolValue::from_phase(theta / geom.macro_ratio() as f64);
        let reference = lambda0_quadratic(&profile, s)?;
        let single = slow_eigenvalue(&profile, &geom, &spec, theta, false)?;
        let ens = slow_eigenvalue(&profile, &geom, &spec, theta, true)?;
        println!(
            "theta {theta:.2}: reference {reference:.6e}  single {:.6e}  ensemble {:.6e} ({} configurations, {} iterations)",
            single.lambda.re,
            ens.lambda.re,
            ens.multiplicities.len(),
            ens.iterations
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
