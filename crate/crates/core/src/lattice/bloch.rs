use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::profile::DiffusivityProfile;
use crate::error::{invalid, Error, Result};

/// Largest period accepted by [`char_poly_bruteforce`].
pub const BRUTEFORCE_MAX_PERIOD: usize = 8;

/// Imaginary residue below which a coefficient is considered real.
pub const IMAG_TOLERANCE: f64 = 1e-10;

/// One-period operator of the lattice with the shift symbol realized as
/// `e^{iφ}` (per-site phase `φ`). Corner entries carry `e^{∓iKφ}` and merge
/// with the interior coupling when K = 2.
pub fn bloch_matrix(profile: &DiffusivityProfile, phase: f64) -> DMatrix<Complex64> {
    let k = profile.period();
    let kap = profile.values();
    let mut m = DMatrix::<Complex64>::zeros(k, k);
    for i in 0..k {
        let left = kap[(i + k - 1) % k];
        m[(i, i)] = Complex64::new(-left - kap[i], 0.0);
    }
    for i in 0..k - 1 {
        m[(i, i + 1)] += kap[i];
        m[(i + 1, i)] += kap[i];
    }
    let corner = Complex64::from_polar(kap[k - 1], k as f64 * phase);
    m[(0, k - 1)] += corner.conj();
    m[(k - 1, 0)] += corner;
    m
}

/// Real eigenvalues of the (Hermitian) Bloch matrix in ascending order.
pub fn bloch_eigenvalues(profile: &DiffusivityProfile, phase: f64) -> Vec<f64> {
    let eig = nalgebra::SymmetricEigen::new(bloch_matrix(profile, phase));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

pub fn smallest_magnitude_eigenvalue(profile: &DiffusivityProfile, phase: f64) -> f64 {
    bloch_eigenvalues(profile, phase)
        .into_iter()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .expect("non-empty spectrum")
}

type Poly = Vec<Complex64>;

fn poly_mul_add(acc: &mut Poly, a: &Poly, b: &Poly, sign: f64) {
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            acc[i + j] += ai * bj * sign;
        }
    }
}

/// Coefficients of `det(λI − M)` (index q holds the λ^q coefficient; the
/// λ^K coefficient is 1), by cofactor expansion with polynomial entries.
pub fn char_poly_bruteforce(profile: &DiffusivityProfile, phase: f64) -> Result<Vec<f64>> {
    let k = profile.period();
    if k > BRUTEFORCE_MAX_PERIOD {
        return invalid(format!(
            "bruteforce characteristic polynomial limited to K <= {BRUTEFORCE_MAX_PERIOD}, got {k}"
        ));
    }
    let m = bloch_matrix(profile, phase);
    // entry (i, j) of λI − M as a degree-1 polynomial
    let entry = |i: usize, j: usize| -> Poly {
        let mut p = vec![-m[(i, j)], Complex64::new(0.0, 0.0)];
        if i == j {
            p[1] = Complex64::new(1.0, 0.0);
        }
        p
    };
    let mut memo: HashMap<(usize, u32), Poly> = HashMap::new();
    let det = minor(0, 0, k, &entry, &mut memo);
    let mut coeffs = Vec::with_capacity(k + 1);
    for (q, c) in det.iter().take(k + 1).enumerate() {
        if c.im.abs() > IMAG_TOLERANCE * c.re.abs().max(1.0) {
            return Err(Error::Consistency(format!(
                "characteristic coefficient {q} has imaginary residue {:e}",
                c.im
            )));
        }
        coeffs.push(c.re);
    }
    Ok(coeffs)
}

/// Determinant of the submatrix formed by rows `row..k` and the columns not in `used`.
fn minor(
    row: usize,
    used: u32,
    k: usize,
    entry: &dyn Fn(usize, usize) -> Poly,
    memo: &mut HashMap<(usize, u32), Poly>,
) -> Poly {
    if row == k {
        return vec![Complex64::new(1.0, 0.0)];
    }
    if let Some(p) = memo.get(&(row, used)) {
        return p.clone();
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); k - row + 1];
    let mut sign = 1.0;
    for col in 0..k {
        if used & (1 << col) != 0 {
            continue;
        }
        let sub = minor(row + 1, used | (1 << col), k, entry, memo);
        poly_mul_add(&mut acc, &entry(row, col), &sub, sign);
        sign = -sign;
    }
    memo.insert((row, used), acc.clone());
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(v: &[f64]) -> DiffusivityProfile {
        DiffusivityProfile::new(v.to_vec()).unwrap()
    }

    #[test]
    fn period_two_at_zero_phase_merges_couplings() {
        let m = bloch_matrix(&p(&[1.0, 1.0]), 0.0);
        let expect = [[-2.0, 2.0], [2.0, -2.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[(i, j)] - Complex64::new(expect[i][j], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn hermitian_for_any_phase() {
        let prof = p(&[1.0, 2.5, 0.7, 3.0, 1.1]);
        for phase in [0.0, 0.3, 1.7, -2.2, PI] {
            let m = bloch_matrix(&prof, phase);
            assert!((&m - m.adjoint()).norm() < 1e-15);
        }
    }

    #[test]
    fn single_zero_eigenvalue_at_zero_phase() {
        let vals = bloch_eigenvalues(&p(&[1.0, 2.0, 3.0, 0.5]), 0.0);
        let zeros = vals.iter().filter(|v| v.abs() < 1e-12).count();
        assert_eq!(zeros, 1);
        assert!(vals.iter().all(|v| *v < 1e-12));
    }

    #[test]
    fn bruteforce_constant_coefficient() {
        let c = char_poly_bruteforce(&p(&[1.0, 1.0]), PI / 2.0).unwrap();
        assert!((c[0] - 4.0).abs() < 1e-14);
        assert!((c[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_unit_period_four() {
        let c = char_poly_bruteforce(&p(&[1.0; 4]), 0.37).unwrap();
        assert!((c[1] - 16.0).abs() < 1e-12);
        assert!((c[2] - 20.0).abs() < 1e-12);
        assert!((c[4] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_rejects_large_period() {
        assert!(char_poly_bruteforce(&DiffusivityProfile::uniform(1.0, 9).unwrap(), 0.1).is_err());
    }

    #[test]
    fn bruteforce_roots_are_eigenvalues() {
        let prof = p(&[1.0, 3.0, 2.0]);
        let c = char_poly_bruteforce(&prof, 0.4).unwrap();
        for lam in bloch_eigenvalues(&prof, 0.4) {
            let val: f64 = c.iter().enumerate().map(|(q, cq)| cq * lam.powi(q as i32)).sum();
            assert!(val.abs() < 1e-9, "residual {val} at {lam}");
        }
    }
}
