use super::symbol::SymbolValue;
use crate::error::{invalid, Error, Result};
use crate::lattice::DiffusivityProfile;

/// Coefficient `c_q` of `λ^q` in the characteristic equation of the
/// one-period operator.
///
/// `q = 0` carries the symbol, `c_0 = 4 sin²(Kφ/2) κ_g^K`. For `q ≥ 1` the
/// coefficient sums over cyclic compositions: a start link `m_1` and gaps
/// `m_2..m_q ≥ 1` with `m_2 + … + m_q ≤ K − 1`, each contributing
/// `m_2⋯m_q (K − Σm) / (κ_{m_1} κ_{m_1+m_2} ⋯)`.
pub fn char_coeff(q: usize, profile: &DiffusivityProfile, symbol: SymbolValue) -> Result<f64> {
    let k = profile.period();
    if q > k {
        return invalid(format!("coefficient index {q} exceeds period {k}"));
    }
    let product = profile.product();
    if q == 0 {
        return Ok(-symbol.period_symbol(k) * product);
    }
    let inv: Vec<f64> = profile.values().iter().map(|v| 1.0 / v).collect();
    let mut total = 0.0;
    for start in 0..k {
        total += compositions(&inv, k, q - 1, start, k - 1, 1.0, inv[start]);
    }
    Ok(product * total / q as f64)
}

/// Sum over `remaining` further gaps, each at least 1, whose total is at most
/// `budget`; `weight` accumulates gap products and `inv_prod` the reciprocal
/// diffusivities of the chosen links.
fn compositions(
    inv: &[f64],
    k: usize,
    remaining: usize,
    position: usize,
    budget: usize,
    weight: f64,
    inv_prod: f64,
) -> f64 {
    if remaining == 0 {
        // last gap closes the cycle: K − (K − 1 − budget) = budget + 1
        return weight * (budget + 1) as f64 * inv_prod;
    }
    let mut sum = 0.0;
    // leave room for the remaining gaps (each ≥ 1)
    for gap in 1..=budget + 1 - remaining {
        let next = (position + gap) % k;
        sum += compositions(
            inv,
            k,
            remaining - 1,
            next,
            budget - gap,
            weight * gap as f64,
            inv_prod * inv[next],
        );
    }
    sum
}

/// All `K + 1` characteristic coefficients.
pub fn char_coeffs(profile: &DiffusivityProfile, symbol: SymbolValue) -> Vec<f64> {
    (0..=profile.period())
        .map(|q| char_coeff(q, profile, symbol).expect("index within period"))
        .collect()
}

/// Smallest-magnitude root of the quadratic truncation
/// `c_0 + c_1 λ + c_2 λ² = 0`, evaluated as `2c_0 / (−c_1 − √(c_1² − 4c_0c_2))`.
pub fn lambda0_quadratic(profile: &DiffusivityProfile, symbol: SymbolValue) -> Result<f64> {
    let c0 = char_coeff(0, profile, symbol)?;
    let c1 = char_coeff(1, profile, symbol)?;
    let c2 = char_coeff(2, profile, symbol)?;
    let discriminant = c1 * c1 - 4.0 * c0 * c2;
    if discriminant < 0.0 {
        return Err(Error::OutOfRegime {
            phase: symbol.phase(),
            discriminant,
        });
    }
    Ok(2.0 * c0 / (-c1 - discriminant.sqrt()))
}

/// Coefficients of `δ²U` and `δ⁴U` in an emergent evolution
/// `λ ≈ d2·s2 + d4·s2²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmergentCoefficients {
    pub d2: f64,
    pub d4: f64,
}

impl EmergentCoefficients {
    pub fn eval(&self, symbol: SymbolValue) -> f64 {
        let s = symbol.s2();
        self.d2 * s + self.d4 * s * s
    }
}

/// Series form of the quadratic-truncation root: `d2 = κ` (harmonic mean) and
/// `d4 = κ[(K²−1)/12 − c_2 κ² / (K² κ_g^K)]`.
pub fn lambda0_series(profile: &DiffusivityProfile) -> EmergentCoefficients {
    let k = profile.period() as f64;
    let kappa = profile.harmonic_mean();
    let c2 = char_coeff(2, profile, SymbolValue::from_phase(0.0)).expect("period >= 2");
    EmergentCoefficients {
        d2: kappa,
        d4: kappa * ((k * k - 1.0) / 12.0 - c2 * kappa * kappa / (k * k * profile.product())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(v: &[f64]) -> DiffusivityProfile {
        DiffusivityProfile::new(v.to_vec()).unwrap()
    }

    #[test]
    fn leading_coefficient_is_one() {
        for v in [vec![1.0, 2.0], vec![0.5, 1.5, 2.5], vec![1.0, 3.0, 0.2, 4.0, 1.1, 0.9]] {
            let prof = p(&v);
            let c = char_coeff(prof.period(), &prof, SymbolValue::from_phase(0.3)).unwrap();
            assert!((c - 1.0).abs() < 1e-13, "c_K = {c}");
        }
    }

    #[test]
    fn unit_period_four() {
        let prof = p(&[1.0; 4]);
        let s = SymbolValue::from_phase(0.2);
        assert!((char_coeff(1, &prof, s).unwrap() - 16.0).abs() < 1e-12);
        assert!((char_coeff(2, &prof, s).unwrap() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn linear_coefficient_closed_form() {
        let prof = p(&[0.7, 1.9, 1.2, 3.3, 0.4]);
        let k = prof.period() as f64;
        let c1 = char_coeff(1, &prof, SymbolValue::from_phase(1.0)).unwrap();
        assert!((c1 - k * k * prof.product() / prof.harmonic_mean()).abs() < 1e-12 * c1);
    }

    #[test]
    fn quadratic_coefficient_period_four_formula() {
        let v = [1.3, 0.6, 2.2, 0.9];
        let prof = p(&v);
        let c2 = char_coeff(2, &prof, SymbolValue::from_phase(0.0)).unwrap();
        let nn: f64 = (0..4).map(|i| v[i] * v[(i + 1) % 4]).sum();
        let nnn: f64 = (0..2).map(|i| v[i] * v[i + 2]).sum();
        assert!((c2 - (3.0 * nn + 4.0 * nnn)).abs() < 1e-12);
    }

    #[test]
    fn index_out_of_range() {
        assert!(char_coeff(4, &p(&[1.0, 2.0, 3.0]), SymbolValue::from_phase(0.1)).is_err());
    }

    #[test]
    fn lambda0_neutral_at_zero_phase() {
        assert_eq!(lambda0_quadratic(&p(&[1.0, 2.0, 3.0]), SymbolValue::from_phase(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn lambda0_uniform_period_two() {
        let prof = p(&[1.0, 1.0]);
        for phase in [0.05, 0.4, 1.0, 1.5] {
            let l = lambda0_quadratic(&prof, SymbolValue::from_phase(phase)).unwrap();
            assert!((l + 2.0 * (1.0 - phase.cos())).abs() < 1e-13);
        }
    }

    #[test]
    fn series_uniform_period_two() {
        // c_2 = c_K = 1, so d4 = κ0 [1/4 − 1/4] = 0 and λ0 = κ0 s2 exactly
        let e = lambda0_series(&DiffusivityProfile::uniform(1.7, 2).unwrap());
        assert!((e.d2 - 1.7).abs() < 1e-14);
        assert!(e.d4.abs() < 1e-14);
        let phase: f64 = 0.1;
        let exact = -4.0 * 1.7 * (phase / 2.0).sin().powi(2);
        assert!((e.eval(SymbolValue::from_phase(phase)) - exact).abs() < 1e-15);
    }

    #[test]
    fn series_uniform_any_period_has_no_quartic_term() {
        for k in 2..9 {
            let e = lambda0_series(&DiffusivityProfile::uniform(0.8, k).unwrap());
            assert!(e.d4.abs() < 1e-12, "K={k}: d4={}", e.d4);
        }
    }

    #[test]
    fn series_is_reflection_symmetric() {
        let prof = p(&[1.0, 2.0, 3.0, 4.0, 0.5]);
        let a = lambda0_series(&prof);
        let b = lambda0_series(&prof.reversed());
        assert!((a.d2 - b.d2).abs() < 1e-14 && (a.d4 - b.d4).abs() < 1e-12);
    }

    #[test]
    fn out_of_regime_reports_phase() {
        // strongly varying K = 6 profile near φ = π/K: 4 c0 c2 > c1²
        let prof = p(&[1.0, 100.0, 1.0, 100.0, 1.0, 100.0]);
        let mut hit = false;
        for i in 1..200 {
            let phase = PI * i as f64 / 200.0;
            if let Err(Error::OutOfRegime { phase: ph, .. }) = lambda0_quadratic(&prof, SymbolValue::from_phase(phase)) {
                assert_eq!(ph, phase);
                hit = true;
            }
        }
        assert!(hit);
    }
}
