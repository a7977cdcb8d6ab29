use crate::error::{invalid, Result};

/// K periodic diffusivity values `κ_1..κ_K`, stored zero-based.
///
/// Value `values[m]` sits on the half-lattice link between sites `i` and
/// `i + 1` whenever `i ≡ m (mod K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusivityProfile {
    values: Vec<f64>,
}

impl DiffusivityProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return invalid(format!("diffusivity period must be at least 2, got {}", values.len()));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return invalid(format!("diffusivities must be finite and positive, got {bad}"));
        }
        Ok(Self { values })
    }

    pub fn uniform(kappa: f64, period: usize) -> Result<Self> {
        Self::new(vec![kappa; period])
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Diffusivity on link `i` (between sites `i` and `i + 1`), periodic in `i`.
    pub fn link(&self, i: i64) -> f64 {
        self.values[i.rem_euclid(self.values.len() as i64) as usize]
    }

    /// `κ_g^K`, the product of all values.
    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }

    pub fn geometric_mean(&self) -> f64 {
        let k = self.values.len() as f64;
        (self.values.iter().map(|v| v.ln()).sum::<f64>() / k).exp()
    }

    pub fn harmonic_mean(&self) -> f64 {
        let k = self.values.len() as f64;
        k / self.values.iter().map(|v| 1.0 / v).sum::<f64>()
    }

    pub fn arithmetic_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::MIN, f64::max)
    }

    /// Cyclic translation: `shifted(s).values()[m] == values()[(m + s) mod K]`.
    pub fn shifted(&self, s: usize) -> Self {
        let k = self.values.len();
        Self {
            values: (0..k).map(|m| self.values[(m + s) % k]).collect(),
        }
    }

    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { values }
    }

    pub fn is_uniform(&self) -> bool {
        self.values.iter().all(|v| *v == self.values[0])
    }
}

/// Largest `|η_i|` for which quadratic-in-η coefficients are meaningful.
pub const MODERATE_VARIATION_LIMIT: f64 = 0.2;

/// Diffusivities written as `κ_0 (1 + η_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationProfile {
    base: f64,
    variations: Vec<f64>,
}

impl VariationProfile {
    pub fn new(base: f64, variations: Vec<f64>) -> Result<Self> {
        if !(base.is_finite() && base > 0.0) {
            return invalid(format!("base diffusivity must be positive, got {base}"));
        }
        if variations.len() < 2 {
            return invalid(format!("diffusivity period must be at least 2, got {}", variations.len()));
        }
        if let Some(eta) = variations.iter().find(|e| !(e.is_finite() && **e > -1.0)) {
            return invalid(format!("variation {eta} makes a diffusivity non-positive"));
        }
        Ok(Self { base, variations })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn variations(&self) -> &[f64] {
        &self.variations
    }

    pub fn period(&self) -> usize {
        self.variations.len()
    }

    pub fn max_abs_variation(&self) -> f64 {
        self.variations.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    pub fn is_moderate(&self) -> bool {
        self.max_abs_variation() <= MODERATE_VARIATION_LIMIT
    }

    pub fn to_profile(&self) -> DiffusivityProfile {
        DiffusivityProfile {
            values: self.variations.iter().map(|e| self.base * (1.0 + e)).collect(),
        }
    }
}
