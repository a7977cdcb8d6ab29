//! Truncated binomial conversions between microscale and macroscale
//! difference operators, checked on Fourier symbols.
//!
//! With `ε̄ = ε^a`, `a = N` from micro to macro and `a = 1/N` back, and
//! `ε^{±1} = 1 ± μδ + δ²/2`:
//!
//! ```text
//! δ̄²  = Σ_l C(a, l) [(μδ + δ²/2)^l + (−μδ + δ²/2)^l]
//! μ̄δ̄ = Σ_l C(a, l) [(μδ + δ²/2)^l − (−μδ + δ²/2)^l] / 2
//! ```

use num_complex::Complex64;

use super::geometry::PatchGeometry;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConversionDirection {
    /// Macroscale operators written in microscale ones.
    MicroToMacro,
    /// Microscale operators written in macroscale ones.
    MacroToMicro,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConversionReport {
    pub direction: ConversionDirection,
    pub l_max: usize,
    /// Source-scale phases, halving.
    pub phases: Vec<f64>,
    pub second_difference_residuals: Vec<f64>,
    pub mean_difference_residuals: Vec<f64>,
    /// `log2` of the last residual ratio.
    pub second_difference_order: f64,
    pub mean_difference_order: f64,
    pub zero_phase_residual: f64,
    /// Largest `|S(φ) + S(−φ)|` of the mean-difference series.
    pub parity_defect: f64,
}

const GRID: usize = 5;

fn binomial(a: f64, l: usize) -> f64 {
    (0..l).fold(1.0, |acc, k| acc * (a - k as f64) / (k + 1) as f64)
}

/// Truncated series for the target-scale `(δ², μδ)` symbols at source phase `phase`.
fn series(a: f64, l_max: usize, phase: f64) -> (Complex64, Complex64) {
    let md = Complex64::new(0.0, phase.sin());
    let d2 = Complex64::new(2.0 * phase.cos() - 2.0, 0.0);
    let plus = md + d2 / 2.0;
    let minus = -md + d2 / 2.0;
    let (mut second, mut mean) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for l in 1..=l_max {
        let c = binomial(a, l);
        let (p, m) = (plus.powu(l as u32), minus.powu(l as u32));
        second += c * (p + m);
        mean += c * (p - m) / 2.0;
    }
    (second, mean)
}

fn residuals(a: f64, l_max: usize, phase: f64) -> (f64, f64) {
    let (second, mean) = series(a, l_max, phase);
    let exact_second = Complex64::new(2.0 * (a * phase).cos() - 2.0, 0.0);
    let exact_mean = Complex64::new(0.0, (a * phase).sin());
    ((second - exact_second).norm(), (mean - exact_mean).norm())
}

fn order(res: &[f64]) -> f64 {
    let n = res.len();
    (res[n - 2] / res[n - 1]).log2()
}

pub fn conversion_series(direction: ConversionDirection, l_max: usize, geom: &PatchGeometry) -> Result<ConversionReport> {
    if l_max == 0 {
        return invalid("conversion series needs l_max >= 1");
    }
    // (n − b)/r = N
    let ratio = (geom.n() - geom.b()) as f64 / geom.r();
    let (a, start) = match direction {
        ConversionDirection::MicroToMacro => (ratio, 0.4 / ratio),
        ConversionDirection::MacroToMicro => (1.0 / ratio, 0.4),
    };
    let phases: Vec<f64> = (0..GRID).map(|k| start / f64::powi(2.0, k as i32)).collect();
    let (second, mean): (Vec<f64>, Vec<f64>) = phases.iter().map(|&p| residuals(a, l_max, p)).unzip();
    let (z2, zm) = residuals(a, l_max, 0.0);
    let parity_defect = phases
        .iter()
        .map(|&p| (series(a, l_max, p).1 + series(a, l_max, -p).1).norm())
        .fold(0.0, f64::max);
    Ok(ConversionReport {
        direction,
        l_max,
        second_difference_order: order(&second),
        mean_difference_order: order(&mean),
        phases,
        second_difference_residuals: second,
        mean_difference_residuals: mean,
        zero_phase_residual: z2.max(zm),
        parity_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_phase_both_sides_vanish() {
        let g = PatchGeometry::for_sweep(5, 2).unwrap();
        for d in [ConversionDirection::MicroToMacro, ConversionDirection::MacroToMicro] {
            assert_eq!(conversion_series(d, 4, &g).unwrap().zero_phase_residual, 0.0);
        }
    }

    #[test]
    fn truncation_order_at_l_four() {
        let g = PatchGeometry::for_sweep(6, 3).unwrap();
        for d in [ConversionDirection::MicroToMacro, ConversionDirection::MacroToMicro] {
            let r = conversion_series(d, 4, &g).unwrap();
            assert!(r.second_difference_order > 5.9, "{r:?}");
            assert!(r.mean_difference_order > 4.9, "{r:?}");
            assert!(r.parity_defect < 1e-15);
        }
    }

    #[test]
    fn integer_exponent_series_terminates() {
        // a = N is a positive integer: the binomial series is finite
        let g = PatchGeometry::new(1, 0, 1.0, 3).unwrap();
        let r = conversion_series(ConversionDirection::MicroToMacro, 3, &g).unwrap();
        assert!(r.second_difference_residuals.iter().all(|x| *x < 1e-14));
    }

    #[test]
    fn rejects_empty_series() {
        let g = PatchGeometry::for_sweep(3, 1).unwrap();
        assert!(conversion_series(ConversionDirection::MacroToMicro, 0, &g).is_err());
    }
}
