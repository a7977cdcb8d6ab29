use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::lattice::DiffusivityProfile;
use crate::patch::{jet_configurations, slow_eigenvalue, slow_eigenvalue_jet, CouplingSpec, PatchGeometry};
use crate::scalar::Jet;
use crate::theory::{quadratic_table, SymbolValue};

/// How the patch evolution is expanded in `η` and the symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtractionMethod {
    /// Exact Taylor coefficients from the secular system solved over jets.
    Taylor,
    /// Central differences of size `eta_step` in `η`, with a `(s2, s2²)`
    /// regression over four halved macroscale phases from `theta0`.
    FiniteDifference { eta_step: f64, theta0: f64 },
}

impl ExtractionMethod {
    pub fn finite_difference() -> Self {
        ExtractionMethod::FiniteDifference {
            eta_step: 1e-2,
            theta0: std::f64::consts::PI / 8.0,
        }
    }
}

/// Patch-side coefficients of
/// `λ = (1 + d_lin Ση − d0 Ση² + Σ dk η_i η_{i+k}) s2 + (f_lin Ση + f0 Ση² + Σ fk η_i η_{i+k}) s2²`
/// for unit base diffusivity.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientExtraction {
    pub period: usize,
    pub method: ExtractionMethod,
    /// `η = 0` values of the `s2` and `s2²` coefficients.
    pub base: (f64, f64),
    pub d_lin: f64,
    pub d0_hat: f64,
    pub dk_hat: Vec<f64>,
    pub f_lin: f64,
    pub f0_hat: f64,
    pub fk_hat: Vec<f64>,
    /// Largest odd-phase or imaginary coefficient seen (drift).
    pub drift: f64,
    /// Largest relative regression residual (finite differences only).
    pub fit_residual: f64,
}

impl CoefficientExtraction {
    pub fn d_list(&self) -> Vec<f64> {
        std::iter::once(self.d0_hat).chain(self.dk_hat.iter().copied()).collect()
    }

    pub fn f_list(&self) -> Vec<f64> {
        std::iter::once(self.f0_hat).chain(self.fk_hat.iter().copied()).collect()
    }
}

/// `(s2, s2²)` coefficients of one probe, split by order in the probe
/// scale: `[constant, linear, quadratic]` for each.
#[derive(Debug, Clone, Copy)]
struct Probe {
    d2: [f64; 3],
    d4: [f64; 3],
    drift: f64,
    fit: f64,
}

fn probe_taylor(eta: &[f64], geom: &PatchGeometry, spec: &CouplingSpec, use_ensemble: bool) -> Result<Probe> {
    let configs = jet_configurations(1.0, eta, use_ensemble);
    let lam: Jet = slow_eigenvalue_jet(&configs, geom, spec)?;
    let mut d2 = [0.0; 3];
    let mut d4 = [0.0; 3];
    let mut drift: f64 = 0.0;
    for p in 0..3 {
        let (a2, a4) = (lam.coeff(p, 2), lam.coeff(p, 4));
        // s2 = −φ² + φ⁴/12 + …
        d2[p] = -a2.re;
        d4[p] = a4.re + a2.re / 12.0;
        for m in [0, 1, 3] {
            drift = drift.max(lam.coeff(p, m).norm());
        }
        drift = drift.max(a2.im.abs()).max(a4.im.abs());
    }
    Ok(Probe { d2, d4, drift, fit: 0.0 })
}

/// Least-squares `λ ≈ c1 s2 + c2 s2²` over the halved phase grid.
fn regress(profile: &DiffusivityProfile, geom: &PatchGeometry, spec: &CouplingSpec, use_ensemble: bool, theta0: f64) -> Result<(f64, f64, f64, f64)> {
    let mut rows = Vec::new();
    let mut drift: f64 = 0.0;
    for k in 0..4 {
        let theta = theta0 / f64::powi(2.0, k);
        let mode = slow_eigenvalue(profile, geom, spec, theta, use_ensemble)?;
        let s2 = SymbolValue::from_phase(theta / geom.macro_ratio() as f64).s2();
        drift = drift.max(mode.lambda.im.abs() / s2.abs());
        rows.push((s2, mode.lambda.re));
    }
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(s, l) in &rows {
        a11 += s * s;
        a12 += s * s * s;
        a22 += s * s * s * s;
        b1 += s * l;
        b2 += s * s * l;
    }
    let det = a11 * a22 - a12 * a12;
    let c1 = (b1 * a22 - b2 * a12) / det;
    let c2 = (a11 * b2 - a12 * b1) / det;
    let fit = rows
        .iter()
        .map(|&(s, l)| ((l - c1 * s - c2 * s * s) / (c1 * s)).abs())
        .fold(0.0, f64::max);
    Ok((c1, c2, drift, fit))
}

fn probe_fd(eta: &[f64], geom: &PatchGeometry, spec: &CouplingSpec, use_ensemble: bool, eps: f64, theta0: f64) -> Result<Probe> {
    let eval = |sign: f64| -> Result<(f64, f64, f64, f64)> {
        let values: Vec<f64> = eta.iter().map(|e| 1.0 + sign * eps * e).collect();
        regress(&DiffusivityProfile::new(values)?, geom, spec, use_ensemble, theta0)
    };
    let zero = eval(0.0)?;
    let plus = eval(1.0)?;
    let minus = eval(-1.0)?;
    let split = |z: f64, p: f64, m: f64| [z, (p - m) / (2.0 * eps), (p + m - 2.0 * z) / (2.0 * eps * eps)];
    Ok(Probe {
        d2: split(zero.0, plus.0, minus.0),
        d4: split(zero.1, plus.1, minus.1),
        drift: zero.2.max(plus.2).max(minus.2),
        fit: zero.3.max(plus.3).max(minus.3),
    })
}

fn unit(period: usize, entries: &[(usize, f64)]) -> Vec<f64> {
    let mut v = vec![0.0; period];
    for &(i, x) in entries {
        v[i % period] += x;
    }
    v
}

pub fn extract_coefficients(period: usize, geom: &PatchGeometry, spec: &CouplingSpec, use_ensemble: bool) -> Result<CoefficientExtraction> {
    extract_coefficients_with(period, geom, spec, use_ensemble, ExtractionMethod::Taylor)
}

pub fn extract_coefficients_with(
    period: usize,
    geom: &PatchGeometry,
    spec: &CouplingSpec,
    use_ensemble: bool,
    method: ExtractionMethod,
) -> Result<CoefficientExtraction> {
    if period < 2 {
        return invalid(format!("period must be at least 2, got {period}"));
    }
    let probe = |eta: Vec<f64>| match method {
        ExtractionMethod::Taylor => probe_taylor(&eta, geom, spec, use_ensemble),
        ExtractionMethod::FiniteDifference { eta_step, theta0 } => {
            probe_fd(&eta, geom, spec, use_ensemble, eta_step, theta0)
        }
    };
    // the ensemble makes every site equivalent
    let sites: Vec<usize> = if use_ensemble { vec![0] } else { (0..period).collect() };
    let count = sites.len() as f64;
    let (mut drift, mut fit): (f64, f64) = (0.0, 0.0);
    let mut base = (0.0, 0.0);
    let (mut d_lin, mut f_lin, mut d_diag, mut f_diag) = (0.0, 0.0, 0.0, 0.0);
    for &i in &sites {
        let p = probe(unit(period, &[(i, 1.0)]))?;
        base = (p.d2[0], p.d4[0]);
        d_lin += p.d2[1] / count;
        f_lin += p.d4[1] / count;
        d_diag += p.d2[2] / count;
        f_diag += p.d4[2] / count;
        drift = drift.max(p.drift);
        fit = fit.max(p.fit);
    }
    let mut dk_hat = Vec::new();
    let mut fk_hat = Vec::new();
    for lag in 1..=period / 2 {
        let (mut d, mut f) = (0.0, 0.0);
        for &i in &sites {
            let sum = probe(unit(period, &[(i, 1.0), (i + lag, 1.0)]))?;
            let diff = probe(unit(period, &[(i, 1.0), (i + lag, -1.0)]))?;
            // quadratic form: q(e_i ± e_j) = M_ii + M_jj ± 2 M_ij
            let mij_d = (sum.d2[2] - diff.d2[2]) / 4.0;
            let mij_f = (sum.d4[2] - diff.d4[2]) / 4.0;
            let factor = if 2 * lag == period { 1.0 } else { 2.0 };
            d += factor * mij_d / count;
            f += factor * mij_f / count;
            drift = drift.max(sum.drift).max(diff.drift);
            fit = fit.max(sum.fit).max(diff.fit);
        }
        dk_hat.push(d);
        fk_hat.push(f);
    }
    let out = CoefficientExtraction {
        period,
        method,
        base,
        d_lin,
        d0_hat: -d_diag,
        dk_hat,
        f_lin,
        f0_hat: f_diag,
        fk_hat,
        drift,
        fit_residual: fit,
    };
    if out.d_list().iter().chain(out.f_list().iter()).any(|x| !x.is_finite()) {
        return Err(Error::Consistency("non-finite extracted coefficient".into()));
    }
    Ok(out)
}

/// `(reference − extracted) / reference` for `d0, d1, …`.
pub fn delta_dk(extraction: &CoefficientExtraction, period: usize) -> Result<Vec<f64>> {
    let table = quadratic_table(period)?;
    let reference = table.d_list();
    if reference.len() != extraction.d_list().len() {
        return invalid(format!("extraction has period {} not {period}", extraction.period));
    }
    assert!(reference.iter().all(|r| *r != 0.0), "quadratic d coefficients are nonzero");
    Ok(reference
        .iter()
        .zip(extraction.d_list())
        .map(|(r, e)| (r - e) / r)
        .collect())
}

/// Like [`delta_dk`] for `f0, f1, …`; entries whose reference is zero
/// report the absolute difference instead.
pub fn delta_fk(extraction: &CoefficientExtraction, period: usize) -> Result<Vec<f64>> {
    let reference = quadratic_table(period)?.f_list();
    if reference.len() != extraction.f_list().len() {
        return invalid(format!("extraction has period {} not {period}", extraction.period));
    }
    Ok(reference
        .iter()
        .zip(extraction.f_list())
        .map(|(r, e)| if *r == 0.0 { r - e } else { (r - e) / r })
        .collect())
}

/// Jet probe as a complex series, for diagnostics and examples.
pub fn slow_eigenvalue_series(
    eta: &[f64],
    geom: &PatchGeometry,
    spec: &CouplingSpec,
    use_ensemble: bool,
) -> Result<[[Complex64; 5]; 3]> {
    let configs = jet_configurations(1.0, eta, use_ensemble);
    let lam = slow_eigenvalue_jet(&configs, geom, spec)?;
    let mut out = [[Complex64::new(0.0, 0.0); 5]; 3];
    for (p, row) in out.iter_mut().enumerate() {
        for (m, c) in row.iter_mut().enumerate() {
            *c = lam.coeff(p, m);
        }
    }
    Ok(out)
}
