// Characteristic coefficients of a period-4 medium and the small-variation
// coefficient table.
//
// ```bash
// cargo run --example reference_coefficients
// ```

use patchdyn::lattice::{DiffusivityProfile, VariationProfile};
use patchdyn::theory::{char_coeffs, g0_coefficients, lambda0_quadratic, lambda0_series, quadratic_table, SymbolValue};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let profile = DiffusivityProfile::new(vec![1.0, 3.0, 2.0, 0.5])?;
    let phase = 0.3;
    let s = SymbolValue::from_phase(phase);
    println!("c_q at phase {phase}: {:?}", char_coeffs(&profile, s));
    println!("harmonic mean {:.6}", profile.harmonic_mean());

    let series = lambda0_series(&profile);
    println!("lambda0 quadratic {:.10}", lambda0_quadratic(&profile, s)?);
    println!("lambda0 series    {:.10}  (d2 {:.6}, d4 {:.6})", series.eval(s), series.d2, series.d4);

    for k in [2, 3, 4, 6] {
        let t = quadratic_table(k)?;
        println!("K = {k}: d = {:.4} d_list {:?} f_list {:?}", t.d, t.d_list(), t.f_list());
    }

    let small = VariationProfile::new(1.0, vec![0.05, -0.02, 0.03, -0.06])?;
    let approx = g0_coefficients(&small);
    let exact = lambda0_series(&small.to_profile());
    println!("small variation: d2 {:.8} vs {:.8}, d4 {:.8} vs {:.8}", approx.d2, exact.d2, approx.d4, exact.d4);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
