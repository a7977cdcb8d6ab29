// Slow branch of the one-period Bloch operator against the quadratic
// truncation, phase by phase.

use patchdyn::lattice::{bloch_eigenvalues, smallest_magnitude_eigenvalue, DiffusivityProfile};
use patchdyn::theory::{lambda0_quadratic, SymbolValue};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let profile = DiffusivityProfile::new(vec![1.0, 4.0, 2.0])?;
    println!("{:>8} {:>16} {:>16} {:>12}", "phase", "bloch", "quadratic", "rel gap");
    for i in 1..=8 {
        let phase = 0.05 * i as f64;
        let bloch = smallest_magnitude_eigenvalue(&profile, phase);
        let quad = lambda0_quadratic(&profile, SymbolValue::from_phase(phase))?;
        println!("{phase:>8.3} {bloch:>16.10} {quad:>16.10} {:>12.3e}", (quad - bloch).abs() / bloch.abs());
    }
    println!("full spectrum at 0.2: {:?}", bloch_eigenvalues(&profile, 0.2));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
