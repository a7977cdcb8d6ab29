use num_complex::Complex64;

use super::geometry::{CouplingSpec, PatchGeometry};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Macroscale field `U_j` on a periodic row of patches.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroField {
    pub values: Vec<f64>,
    pub spacing: f64,
    pub time: f64,
}

impl MacroField {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Minimum number of periodic patches for a cutoff-`Γ` stencil.
pub fn min_patches(spec: &CouplingSpec) -> usize {
    (2 * spec.cutoff() + 1).max(8)
}

fn second_difference(u: &[f64]) -> Vec<f64> {
    let len = u.len();
    (0..len)
        .map(|j| u[(j + 1) % len] - 2.0 * u[j] + u[(j + len - 1) % len])
        .collect()
}

fn mean_difference(u: &[f64]) -> Vec<f64> {
    let len = u.len();
    (0..len)
        .map(|j| 0.5 * (u[(j + 1) % len] - u[(j + len - 1) % len]))
        .collect()
}

/// Required left and right buffer averages for every patch.
pub fn coupling_targets_all(u: &MacroField, geom: &PatchGeometry, spec: &CouplingSpec) -> Result<Vec<(f64, f64)>> {
    let len = u.len();
    if len < 2 * spec.cutoff() + 1 {
        return invalid(format!(
            "{len} periodic patches cannot carry a cutoff-{} stencil",
            spec.cutoff()
        ));
    }
    let r = geom.r();
    let weights = spec.weights(r);
    let mut left = u.values.clone();
    let mut right = u.values.clone();
    // d2k = δ̄^{2k-2} U at the top of each iteration
    let mut d2k = u.values.clone();
    for (k, w) in weights.iter().enumerate() {
        let k = k + 1;
        let odd = mean_difference(&d2k);
        d2k = second_difference(&d2k);
        let shift = 2.0 * k as f64 / r;
        for j in 0..len {
            left[j] += w * (-shift * odd[j] + d2k[j]);
            right[j] += w * (shift * odd[j] + d2k[j]);
        }
    }
    Ok(left.into_iter().zip(right).collect())
}

/// `(left, right)` buffer targets of patch `j`.
pub fn coupling_targets(u: &MacroField, j: usize, geom: &PatchGeometry, spec: &CouplingSpec) -> Result<(f64, f64)> {
    if j >= u.len() {
        return invalid(format!("patch index {j} out of range for {} patches", u.len()));
    }
    Ok(coupling_targets_all(u, geom, spec)?[j])
}

/// Fourier symbols of the coupling targets for `U_j = e^{iθj}`, given
/// `cos θ` and `sin θ` in the working number type.
pub fn coupling_symbols<T: Scalar>(cos_theta: T, sin_theta: T, geom: &PatchGeometry, spec: &CouplingSpec) -> (T, T) {
    let r = geom.r();
    let s = (cos_theta - T::one()) * T::from_f64(2.0);
    let odd = sin_theta * T::from_complex(Complex64::new(0.0, 1.0));
    let mut left = T::one();
    let mut right = T::one();
    let mut s_pow = T::one();
    for (k, w) in spec.weights(r).into_iter().enumerate() {
        let k = k + 1;
        let shift = T::from_f64(2.0 * k as f64 / r);
        let odd_term = shift * odd * s_pow;
        s_pow = s_pow * s;
        let wk = T::from_f64(w);
        left = left + wk * (s_pow - odd_term);
        right = right + wk * (s_pow + odd_term);
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(values: Vec<f64>) -> MacroField {
        MacroField {
            values,
            spacing: 1.0,
            time: 0.0,
        }
    }

    #[test]
    fn constants_pass_through() {
        let g = PatchGeometry::new(4, 1, 1.0, 12).unwrap();
        for spec in [CouplingSpec::default(), CouplingSpec::new(0.3, 3).unwrap()] {
            for (l, r) in coupling_targets_all(&field(vec![2.5; 9]), &g, &spec).unwrap() {
                assert!((l - 2.5).abs() < 1e-14 && (r - 2.5).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn linear_field_shifts_by_r() {
        // away from the periodic seam the stencil only sees the linear ramp
        let g = PatchGeometry::new(5, 2, 1.0, 13).unwrap();
        let u = field((0..16).map(|j| j as f64).collect());
        let targets = coupling_targets_all(&u, &g, &CouplingSpec::default()).unwrap();
        for j in 2..14 {
            let (l, r) = targets[j];
            assert!((l - (j as f64 - g.r())).abs() < 1e-13);
            assert!((r - (j as f64 + g.r())).abs() < 1e-13);
        }
    }

    #[test]
    fn quadratic_field_is_interpolated_exactly() {
        // the k = 1 term already carries U(j ± r) exactly for quadratics
        let g = PatchGeometry::new(3, 1, 1.0, 8).unwrap();
        let u = field((0..20).map(|j| (j as f64).powi(2)).collect());
        let targets = coupling_targets_all(&u, &g, &CouplingSpec::default()).unwrap();
        let r = g.r();
        for j in 3..17 {
            let jf = j as f64;
            assert!((targets[j].0 - (jf - r).powi(2)).abs() < 1e-10);
            assert!((targets[j].1 - (jf + r).powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_coupling_decouples() {
        let g = PatchGeometry::new(3, 1, 1.0, 8).unwrap();
        let u = field(vec![1.0, 4.0, -2.0, 0.5, 3.0, 7.0, 1.0, 0.0]);
        let t = coupling_targets_all(&u, &g, &CouplingSpec::new(0.0, 2).unwrap()).unwrap();
        for (j, (l, r)) in t.into_iter().enumerate() {
            assert_eq!(l, u.values[j]);
            assert_eq!(r, u.values[j]);
        }
    }

    #[test]
    fn too_few_patches_rejected() {
        let g = PatchGeometry::new(3, 1, 1.0, 8).unwrap();
        assert!(coupling_targets_all(&field(vec![0.0; 4]), &g, &CouplingSpec::default()).is_err());
        assert!(coupling_targets(&field(vec![0.0; 8]), 8, &g, &CouplingSpec::default()).is_err());
    }

    #[test]
    fn symbols_match_fourier_mode() {
        let g = PatchGeometry::new(4, 2, 1.0, 10).unwrap();
        let spec = CouplingSpec::default();
        let len = 16;
        let theta = 2.0 * std::f64::consts::PI * 3.0 / len as f64;
        let re = field((0..len).map(|j| (theta * j as f64).cos()).collect());
        let im = field((0..len).map(|j| (theta * j as f64).sin()).collect());
        let tr = coupling_targets_all(&re, &g, &spec).unwrap();
        let ti = coupling_targets_all(&im, &g, &spec).unwrap();
        let (sl, sr) = coupling_symbols(Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0), &g, &spec);
        for j in 0..len {
            let mode = Complex64::from_polar(1.0, theta * j as f64);
            assert!((Complex64::new(tr[j].0, ti[j].0) - sl * mode).norm() < 1e-13);
            assert!((Complex64::new(tr[j].1, ti[j].1) - sr * mode).norm() < 1e-13);
        }
    }
}
