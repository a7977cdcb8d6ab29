use crate::error::{invalid, Result};

/// Numeric Fourier symbol of the squared microscale difference `δ²` at a
/// per-site phase `φ`: `s2 = 2 cos φ − 2 = −4 sin²(φ/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue {
    s2: f64,
    phase: f64,
}

impl SymbolValue {
    pub fn from_phase(phase: f64) -> Self {
        let half = (0.5 * phase).sin();
        Self {
            s2: -4.0 * half * half,
            phase,
        }
    }

    /// Symbol from `s2 ∈ [−4, 0]`, choosing the phase in `[0, π]`.
    pub fn from_s2(s2: f64) -> Result<Self> {
        if !(-4.0..=0.0).contains(&s2) {
            return invalid(format!("delta^2 symbol must lie in [-4, 0], got {s2}"));
        }
        let phase = 2.0 * (0.5 * (-s2).sqrt()).asin();
        Ok(Self { s2, phase })
    }

    pub fn s2(&self) -> f64 {
        self.s2
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// `(ε^{K/2} − ε^{−K/2})² = −4 sin²(Kφ/2)`.
    pub fn period_symbol(&self, period: usize) -> f64 {
        let half = (0.5 * period as f64 * self.phase).sin();
        -4.0 * half * half
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_and_zero() {
        assert_eq!(SymbolValue::from_phase(0.0).s2(), 0.0);
        assert!((SymbolValue::from_phase(std::f64::consts::PI).s2() + 4.0).abs() < 1e-15);
        for phase in [0.1, 1.0, 2.0, 3.0] {
            let s = SymbolValue::from_phase(phase);
            assert!(s.s2() < 0.0 && s.s2() >= -4.0);
            let back = SymbolValue::from_s2(s.s2()).unwrap();
            assert!((back.phase() - phase).abs() < 1e-7);
        }
        assert!(SymbolValue::from_s2(0.1).is_err());
    }

    #[test]
    fn period_symbol_series() {
        // (ε^{K/2} − ε^{−K/2})² = K² δ² [1 + (K²−1) δ²/12] + O(δ⁶)
        let s = SymbolValue::from_phase(1e-2);
        for k in 2..7 {
            let kf = k as f64;
            let series = kf * kf * s.s2() * (1.0 + (kf * kf - 1.0) / 12.0 * s.s2());
            assert!((s.period_symbol(k) - series).abs() < 1e-9 * kf.powi(6));
        }
    }
}
