//! Single-configuration patch mode at a fixed trial eigenvalue.
//!
//! Interior rows `λ v_i = κ_i (v_{i+1} − v_i) + κ_{i−1} (v_{i−1} − v_i)`
//! for `|i| < n`, closed by the two buffer-average rows. Units `h = 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::geometry::PatchGeometry;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn link<T: Copy>(kappa: &[T], i: i64) -> T {
    kappa[i.rem_euclid(kappa.len() as i64) as usize]
}

pub(crate) fn mean_over<T: Scalar>(v: &[T], geom: &PatchGeometry, range: std::ops::RangeInclusive<i64>) -> T {
    let mut acc = T::zero();
    for i in range {
        acc = acc + v[geom.index(i)];
    }
    acc / T::from_f64((2 * geom.b() + 1) as f64)
}

pub(crate) fn core_mean<T: Scalar>(v: &[T], geom: &PatchGeometry) -> T {
    mean_over(v, geom, geom.core())
}

/// Mode by forward recurrence from the left edge, two basis solutions
/// combined to meet both buffer targets.
pub(crate) fn shoot_mode<T: Scalar>(kappa: &[T], geom: &PatchGeometry, lambda: T, targets: (T, T)) -> Result<Vec<T>> {
    let n = geom.n() as i64;
    let run = |a0: T, a1: T| {
        let mut v = Vec::with_capacity(geom.sites());
        v.push(a0);
        v.push(a1);
        for i in (-n + 1)..n {
            let k = geom.index(i);
            let next = v[k] + (lambda * v[k] - link(kappa, i - 1) * (v[k - 1] - v[k])) / link(kappa, i);
            v.push(next);
        }
        v
    };
    let p = run(T::one(), T::zero());
    let q = run(T::zero(), T::one());
    let (lp, lq) = (mean_over(&p, geom, geom.left_buffer()), mean_over(&q, geom, geom.left_buffer()));
    let (rp, rq) = (mean_over(&p, geom, geom.right_buffer()), mean_over(&q, geom, geom.right_buffer()));
    let det = lp * rq - lq * rp;
    let scale = (lp * rq).constant_term().norm() + (lq * rp).constant_term().norm();
    if det.constant_term().norm() <= 1e-13 * scale {
        return Err(Error::Singular(format!(
            "buffer constraints degenerate at trial eigenvalue {}",
            lambda.constant_term()
        )));
    }
    let (tl, tr) = targets;
    let a = (tl * rq - tr * lq) / det;
    let c = (lp * tr - rp * tl) / det;
    Ok(p.into_iter().zip(q).map(|(x, y)| a * x + c * y).collect())
}

/// Mode from the full square system by pivoted LU.
pub(crate) fn dense_mode(kappa: &[f64], geom: &PatchGeometry, lambda: Complex64, targets: (Complex64, Complex64)) -> Result<Vec<Complex64>> {
    let n = geom.n() as i64;
    let size = geom.sites();
    let w = Complex64::new(1.0 / (2 * geom.b() + 1) as f64, 0.0);
    let mut a = DMatrix::<Complex64>::zeros(size, size);
    let mut rhs = DVector::<Complex64>::zeros(size);
    for i in geom.left_buffer() {
        a[(0, geom.index(i))] = w;
    }
    rhs[0] = targets.0;
    for i in geom.right_buffer() {
        a[(size - 1, geom.index(i))] = w;
    }
    rhs[size - 1] = targets.1;
    for i in (-n + 1)..n {
        let row = geom.index(i);
        let (kr, kl) = (link(kappa, i), link(kappa, i - 1));
        a[(row, row - 1)] = Complex64::new(kl, 0.0);
        a[(row, row + 1)] = Complex64::new(kr, 0.0);
        a[(row, row)] = Complex64::new(-kr - kl, 0.0) - lambda;
    }
    let lu = a.lu();
    let diag = lu.u().diagonal();
    let big = diag.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let small = diag.iter().fold(f64::INFINITY, |m, z| m.min(z.norm()));
    if small.is_nan() || small <= 1e-14 * big {
        return Err(Error::Singular(format!("patch system singular at trial eigenvalue {lambda}")));
    }
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Singular(format!("patch system singular at trial eigenvalue {lambda}")))?;
    Ok(x.iter().copied().collect())
}
