// Translations and reflections of a profile, merged into distinct
// configurations with multiplicities.

use patchdyn::lattice::{make_ensemble, DiffusivityProfile};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for values in [vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 1.0, 2.0], vec![1.0, 1.0, 5.0, 2.0]] {
        let profile = DiffusivityProfile::new(values)?;
        let ens = make_ensemble(&profile);
        println!("{:?}: {} configurations, weight {}", profile.values(), ens.len(), ens.total_weight());
        for (p, m) in ens.iter() {
            println!("  x{m} {:?}", p.values());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
