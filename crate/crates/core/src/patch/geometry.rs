use std::ops::RangeInclusive;

use crate::error::{invalid, Result};

/// Patch of `2n + 1` sites centred on every macroscale node, with a core of
/// `2b + 1` sites and buffers of the same width at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchGeometry {
    n: usize,
    b: usize,
    h: f64,
    macro_ratio: usize,
}

impl PatchGeometry {
    pub fn new(n: usize, b: usize, h: f64, macro_ratio: usize) -> Result<Self> {
        if n == 0 {
            return invalid("patch half-width n must be positive");
        }
        if b >= n {
            return invalid(format!("buffer half-width b = {b} must satisfy 0 <= b < n = {n}"));
        }
        if 2 * n + 1 > macro_ratio {
            return invalid(format!(
                "patches of {} sites overlap at macro ratio N = {macro_ratio}",
                2 * n + 1
            ));
        }
        if !(h.is_finite() && h > 0.0) {
            return invalid(format!("microscale spacing must be positive, got {h}"));
        }
        Ok(Self { n, b, h, macro_ratio })
    }

    /// Unit spacing and `N = 2n + 2`, the layout used for coefficient sweeps.
    pub fn for_sweep(n: usize, b: usize) -> Result<Self> {
        Self::new(n, b, 1.0, 2 * n + 2)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn macro_ratio(&self) -> usize {
        self.macro_ratio
    }

    /// Macroscale spacing `H = N h`.
    pub fn macro_spacing(&self) -> f64 {
        self.macro_ratio as f64 * self.h
    }

    /// Fractional macroscale shift with `r H = (n − b) h`.
    pub fn r(&self) -> f64 {
        (self.n - self.b) as f64 / self.macro_ratio as f64
    }

    pub fn sites(&self) -> usize {
        2 * self.n + 1
    }

    pub fn core(&self) -> RangeInclusive<i64> {
        -(self.b as i64)..=self.b as i64
    }

    pub fn left_buffer(&self) -> RangeInclusive<i64> {
        -(self.n as i64)..=-(self.n as i64 - 2 * self.b as i64)
    }

    pub fn right_buffer(&self) -> RangeInclusive<i64> {
        (self.n as i64 - 2 * self.b as i64)..=self.n as i64
    }

    /// Storage index of site `i ∈ [−n, n]`.
    pub fn index(&self, i: i64) -> usize {
        (i + self.n as i64) as usize
    }

    pub fn ideal_shift(&self, period: usize) -> bool {
        (self.n - self.b).is_multiple_of(period)
    }

    pub fn ideal_buffer(&self, period: usize) -> bool {
        (2 * self.b + 1).is_multiple_of(period)
    }
}

/// Coupling strength `γ` and the truncation order `Γ` of the interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    gamma: f64,
    cutoff: usize,
}

impl Default for CouplingSpec {
    fn default() -> Self {
        Self { gamma: 1.0, cutoff: 2 }
    }
}

impl CouplingSpec {
    pub fn new(gamma: f64, cutoff: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return invalid(format!("coupling strength must lie in [0, 1], got {gamma}"));
        }
        if cutoff == 0 {
            return invalid("coupling cutoff must be positive");
        }
        Ok(Self { gamma, cutoff })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Weights `w_k = γ^k Π_{l<k}(r² − l²) / (2k)!` for `k = 1..=Γ`.
    pub fn weights(&self, r: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.cutoff);
        let mut prod = 1.0;
        let mut fact = 1.0;
        let mut gk = 1.0;
        for k in 1..=self.cutoff {
            let l = (k - 1) as f64;
            prod *= r * r - l * l;
            fact *= ((2 * k - 1) * 2 * k) as f64;
            gk *= self.gamma;
            out.push(gk * prod / fact);
        }
        out
    }
}
