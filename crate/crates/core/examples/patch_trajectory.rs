// Patch scheme on eight patches against the full lattice, starting from
// one sine wavelength.

use patchdyn::lattice::{full_domain_simulate, stability_bound, DiffusivityProfile, MicroField};
use patchdyn::patch::{core_average_full, run_patch_simulation, CouplingSpec, MacroField, PatchGeometry};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let profile = DiffusivityProfile::new(vec![1.0, 3.0])?;
    let geom = PatchGeometry::new(3, 1, 1.0, 8)?;
    let patches = 8;
    let sites = patches * geom.macro_ratio();
    let w = 2.0 * std::f64::consts::PI / sites as f64;
    let micro = MicroField::new((0..sites).map(|i| (w * i as f64).sin()).collect(), 1.0)?;
    let u0 = MacroField { values: core_average_full(&micro, &geom, patches)?, spacing: geom.macro_spacing(), time: 0.0 };

    let duration = 40.0;
    let traj = run_patch_simulation(&u0, &profile, &geom, &CouplingSpec::default(), duration, 0.05 / profile.max())?;
    let end = traj.last().expect("trajectory includes the start");
    let full = full_domain_simulate(&micro, &profile, duration, 0.5 * stability_bound(1.0, &profile))?;
    let oracle = core_average_full(&full, &geom, patches)?;
    println!("{:>3} {:>12} {:>12}", "j", "patch", "full");
    for (j, (a, b)) in end.values.iter().zip(&oracle).enumerate() {
        println!("{j:>3} {a:>12.6} {b:>12.6}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
