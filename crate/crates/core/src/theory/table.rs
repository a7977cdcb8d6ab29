use super::symbol::SymbolValue;
use crate::error::{invalid, Result};
use crate::lattice::VariationProfile;

/// Coefficients of the complete-domain evolution expanded to second order
/// in small variations `κ_i = κ_0 (1 + η_i)`:
///
/// ```text
/// λ/κ_0 = (1 + d Ση − d0 Ση² + Σ_i Σ_k dk η_i η_{i+k}) s2
///       + (f0 Ση² + Σ_i Σ_k fk η_i η_{i+k}) s2²
/// ```
///
/// with `k = 1..⌊K/2⌋`. The `k = K/2` pair appears twice in `Σ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCoefficientTable {
    pub period: usize,
    pub d: f64,
    pub d0: f64,
    /// `dk[k - 1]` for `k = 1..=⌊K/2⌋`.
    pub dk: Vec<f64>,
    pub f0: f64,
    /// `fk[k - 1]` for `k = 1..=⌊K/2⌋`.
    pub fk: Vec<f64>,
}

impl QuadraticCoefficientTable {
    /// `d0, d1, …, d_{⌊K/2⌋}` in one list (the order used by error metrics).
    pub fn d_list(&self) -> Vec<f64> {
        std::iter::once(self.d0).chain(self.dk.iter().copied()).collect()
    }

    pub fn f_list(&self) -> Vec<f64> {
        std::iter::once(self.f0).chain(self.fk.iter().copied()).collect()
    }
}

pub fn quadratic_table(period: usize) -> Result<QuadraticCoefficientTable> {
    if period < 2 {
        return invalid(format!("period must be at least 2, got {period}"));
    }
    let kf = period as f64;
    let k2 = kf * kf;
    let half = period / 2;
    let antipodal = |k: usize| period.is_multiple_of(2) && k == half;
    let dk = (1..=half)
        .map(|k| if antipodal(k) { 1.0 / k2 } else { 2.0 / k2 })
        .collect();
    let fk = (1..=half)
        .map(|k| {
            if antipodal(k) {
                -(k2 + 2.0) / (24.0 * k2)
            } else {
                ((k2 - 1.0) / 6.0 - (k * (period - k)) as f64) / k2
            }
        })
        .collect();
    Ok(QuadraticCoefficientTable {
        period,
        d: 1.0 / kf,
        d0: (kf - 1.0) / k2,
        dk,
        f0: (k2 - 1.0) / (12.0 * k2),
        fk,
    })
}

/// Emergent coefficients predicted by the small-variation expansion.
pub fn g0_coefficients(variation: &VariationProfile) -> super::EmergentCoefficients {
    let k = variation.period();
    let table = quadratic_table(k).expect("variation profiles have period >= 2");
    let eta = variation.variations();
    let sum: f64 = eta.iter().sum();
    let sq: f64 = eta.iter().map(|e| e * e).sum();
    let mut d_cross = 0.0;
    let mut f_cross = 0.0;
    for lag in 1..=k / 2 {
        let corr: f64 = (0..k).map(|i| eta[i] * eta[(i + lag) % k]).sum();
        d_cross += table.dk[lag - 1] * corr;
        f_cross += table.fk[lag - 1] * corr;
    }
    let kappa0 = variation.base();
    super::EmergentCoefficients {
        d2: kappa0 * (1.0 + table.d * sum - table.d0 * sq + d_cross),
        d4: kappa0 * (table.f0 * sq + f_cross),
    }
}

/// Small-variation ground truth `g_0` (per unit `U_j / h²`) at a symbol.
pub fn g0_small_eta(variation: &VariationProfile, symbol: SymbolValue) -> f64 {
    g0_coefficients(variation).eval(symbol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_two_values() {
        let t = quadratic_table(2).unwrap();
        assert_eq!(t.d, 0.5);
        assert_eq!(t.d0, 0.25);
        assert_eq!(t.dk, vec![0.25]);
        assert_eq!(t.f0, 1.0 / 16.0);
        assert_eq!(t.fk, vec![-1.0 / 16.0]);
    }

    #[test]
    fn period_four_first_lag() {
        let t = quadratic_table(4).unwrap();
        assert_eq!(t.dk[0], 0.125);
        assert_eq!(t.dk[1], 1.0 / 16.0);
        assert!((t.fk[0] + 1.0 / 32.0).abs() < 1e-16);
        assert!((t.fk[1] + 18.0 / 384.0).abs() < 1e-16);
    }

    #[test]
    fn odd_period_has_no_antipodal_entry() {
        let t = quadratic_table(3).unwrap();
        assert_eq!(t.dk.len(), 1);
        assert!((t.dk[0] - 2.0 / 9.0).abs() < 1e-16);
        assert!((t.fk[0] - (8.0 / 6.0 - 2.0) / 9.0).abs() < 1e-16);
        assert!(quadratic_table(1).is_err());
    }

    #[test]
    fn uniform_variation_is_pure_diffusion() {
        let v = VariationProfile::new(1.4, vec![0.0; 5]).unwrap();
        let s = SymbolValue::from_phase(0.3);
        assert!((g0_small_eta(&v, s) - 1.4 * s.s2()).abs() < 1e-15);
    }

    #[test]
    fn single_variation_period_two() {
        let eps = 0.07;
        let v = VariationProfile::new(1.0, vec![eps, 0.0]).unwrap();
        let c = g0_coefficients(&v);
        assert!((c.d2 - (1.0 + eps / 2.0 - eps * eps / 4.0)).abs() < 1e-15);
    }
}
