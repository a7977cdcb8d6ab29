// Extracted coefficient errors for one period across buffer widths. Cells
// with K | (n - b) reproduce the medium to round-off.

use patchdyn::analysis::{delta_dk, delta_fk, extract_coefficients};
use patchdyn::patch::{CouplingSpec, PatchGeometry};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (k, n) = (3, 7);
    let spec = CouplingSpec::default();
    for b in 0..n {
        let geom = PatchGeometry::for_sweep(n, b)?;
        let e = extract_coefficients(k, &geom, &spec, true)?;
        let dd = delta_dk(&e, k)?;
        let df = delta_fk(&e, k)?;
        let tag = if geom.ideal_shift(k) { "  K | (n - b)" } else { "" };
        println!("b = {b}: delta d0 {:>10.3e} delta d1 {:>10.3e} delta f0 {:>10.3e}{tag}", dd[0], dd[1], df[0]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
