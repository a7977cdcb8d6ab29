use std::f64::consts::PI;

use num_complex::Complex64;

use super::coupling::coupling_symbols;
use super::geometry::{CouplingSpec, PatchGeometry};
use super::secular::{core_mean, dense_mode, shoot_mode};
use crate::error::{invalid, Error, Result};
use crate::lattice::{make_ensemble, symmetry_maps, DiffusivityProfile, EnsembleConfigurationSet};
use crate::scalar::{Jet, Scalar, ETA_ORDER, PHASE_ORDER};
use crate::theory::SymbolValue;

const SECANT_TOL: f64 = 1e-13;
const MAX_SECANT: usize = 100;
const RETRIES: usize = 3;

/// Slow Fourier mode `U_j = e^{iθj}` of the patch scheme; the patch
/// evolution is `g_j = λ U_j / h²`.
#[derive(Debug, Clone)]
pub struct SlowMode {
    pub theta: f64,
    pub lambda: Complex64,
    /// `v_{i,e}` per configuration, sites `−n..=n`.
    pub profile_fields: Vec<Vec<Complex64>>,
    pub multiplicities: Vec<usize>,
    pub iterations: usize,
}

impl SlowMode {
    /// Ensemble-and-core average of the fields.
    pub fn amplitude(&self, geom: &PatchGeometry) -> Complex64 {
        weighted_core(&self.profile_fields, &self.multiplicities, geom)
    }
}

fn weighted_core<T: Scalar>(fields: &[Vec<T>], mult: &[usize], geom: &PatchGeometry) -> T {
    let total: usize = mult.iter().sum();
    let mut acc = T::zero();
    for (v, &m) in fields.iter().zip(mult) {
        acc = acc + core_mean(v, geom) * T::from_f64(m as f64);
    }
    acc / T::from_f64(total as f64)
}

fn configurations(profile: &DiffusivityProfile, use_ensemble: bool) -> EnsembleConfigurationSet {
    if use_ensemble {
        make_ensemble(profile)
    } else {
        EnsembleConfigurationSet::single(profile)
    }
}

pub fn slow_eigenvalue(
    profile: &DiffusivityProfile,
    geom: &PatchGeometry,
    spec: &CouplingSpec,
    theta: f64,
    use_ensemble: bool,
) -> Result<SlowMode> {
    if !(0.0..=PI).contains(&theta) {
        return invalid(format!("macroscale phase must lie in [0, pi], got {theta}"));
    }
    let ensemble = configurations(profile, use_ensemble);
    let multiplicities = ensemble.multiplicities().to_vec();
    if theta == 0.0 {
        return Ok(SlowMode {
            theta,
            lambda: Complex64::new(0.0, 0.0),
            profile_fields: vec![vec![Complex64::new(1.0, 0.0); geom.sites()]; ensemble.len()],
            multiplicities,
            iterations: 0,
        });
    }
    let targets = coupling_symbols(
        Complex64::new(theta.cos(), 0.0),
        Complex64::new(theta.sin(), 0.0),
        geom,
        spec,
    );
    let solve = |lambda: Complex64| -> Result<Vec<Vec<Complex64>>> {
        ensemble
            .configurations()
            .iter()
            .map(|c| dense_mode(c.values(), geom, lambda, targets))
            .collect()
    };
    // evaluate the residual, nudging the probe off singular points
    let probe = |lambda: Complex64| -> Result<(Complex64, Complex64, Vec<Vec<Complex64>>)> {
        let mut trial = lambda;
        for attempt in 0..=RETRIES {
            match solve(trial) {
                Ok(fields) => {
                    let rho = weighted_core(&fields, &multiplicities, geom) - 1.0;
                    return Ok((trial, rho, fields));
                }
                Err(Error::Singular(msg)) if attempt == RETRIES => {
                    return Err(Error::Singular(format!("{msg} after {RETRIES} perturbed retries")));
                }
                Err(Error::Singular(_)) => {
                    trial = lambda * (1.0 + 1e-7 * (attempt + 1) as f64) + Complex64::new(1e-14, 0.0);
                }
                Err(e) => return Err(e),
            }
        }
        unreachable!()
    };

    let s2 = SymbolValue::from_phase(theta / geom.macro_ratio() as f64).s2();
    let start = Complex64::new(profile.harmonic_mean() * s2, 0.0);
    let (mut l0, mut f0, _) = probe(start)?;
    let (mut l1, mut f1, _) = probe(start * 1.1)?;
    for it in 1..=MAX_SECANT {
        if f1 == f0 {
            return Err(Error::NoConvergence(format!("secant stalled at theta = {theta}")));
        }
        let l2 = l1 - f1 * (l1 - l0) / (f1 - f0);
        let (l2, f2, fields2) = probe(l2)?;
        let step = (l2 - l1).norm();
        l0 = l1;
        f0 = f1;
        l1 = l2;
        f1 = f2;
        if step <= SECANT_TOL * l1.norm().max(1.0) {
            let mut fields = fields2;
            let norm = f1 + 1.0;
            for v in fields.iter_mut() {
                for x in v.iter_mut() {
                    *x /= norm;
                }
            }
            return Ok(SlowMode {
                theta,
                lambda: l1,
                profile_fields: fields,
                multiplicities,
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence(format!(
        "secant did not converge in {MAX_SECANT} iterations at theta = {theta}"
    )))
}

/// Weighted configurations of jet-valued diffusivities `κ_0 (1 + x η_i)`.
pub(crate) fn jet_configurations(base: f64, eta: &[f64], use_ensemble: bool) -> Vec<(Vec<Jet>, usize)> {
    let k = eta.len();
    let maps = if use_ensemble {
        symmetry_maps(k)
    } else {
        vec![(0..k).collect()]
    };
    let mut out: Vec<(Vec<f64>, usize)> = Vec::new();
    for map in maps {
        let pattern: Vec<f64> = map.iter().map(|&m| eta[m]).collect();
        match out.iter_mut().find(|(p, _)| *p == pattern) {
            Some((_, w)) => *w += 1,
            None => out.push((pattern, 1)),
        }
    }
    let x = Jet::eta_var();
    out.into_iter()
        .map(|(p, w)| {
            let kap = p
                .iter()
                .map(|&e| Jet::from_f64(base) + x * Jet::from_f64(base * e))
                .collect();
            (kap, w)
        })
        .collect()
}

/// Slow eigenvalue as a jet in the variation scale `x` and the per-site
/// phase `φ` (`θ = N φ`), by chord iteration on the secular residual.
pub(crate) fn slow_eigenvalue_jet(configs: &[(Vec<Jet>, usize)], geom: &PatchGeometry, spec: &CouplingSpec) -> Result<Jet> {
    let (cos, sin) = Jet::cos_sin_phase(geom.macro_ratio() as f64);
    let targets = coupling_symbols(cos, sin, geom, spec);
    let mult: Vec<usize> = configs.iter().map(|(_, w)| *w).collect();
    let residual = |kappas: &[Vec<Jet>], lambda: Jet, targets: (Jet, Jet)| -> Result<Jet> {
        let fields = kappas
            .iter()
            .map(|k| shoot_mode(k, geom, lambda, targets))
            .collect::<Result<Vec<_>>>()?;
        Ok(weighted_core(&fields, &mult, geom) - Jet::one())
    };
    // dρ/dλ at the expansion point, read off as a phase-linear coefficient
    let frozen: Vec<Vec<Jet>> = configs
        .iter()
        .map(|(k, _)| k.iter().map(|j| Jet::constant(j.constant_term())).collect())
        .collect();
    let slope = residual(&frozen, Jet::phase_var(), (Jet::one(), Jet::one()))?.coeff(0, 1);
    if slope.norm() == 0.0 {
        return Err(Error::Singular("secular residual has zero slope".into()));
    }
    let kappas: Vec<Vec<Jet>> = configs.iter().map(|(k, _)| k.clone()).collect();
    // each chord step gains one total degree, so the truncated series is
    // exact after DEPTH steps; later steps only measure round-off
    const DEPTH: usize = ETA_ORDER + PHASE_ORDER + 1;
    let mut lambda = Jet::zero();
    for it in 1..=DEPTH + 5 {
        let step = residual(&kappas, lambda, targets)?.scale(1.0 / slope);
        lambda = lambda - step;
        let size = step.magnitude();
        if size <= 1e-15 * lambda.magnitude() || (it >= DEPTH && size <= 1e-8 * lambda.magnitude()) {
            return Ok(lambda);
        }
    }
    Err(Error::NoConvergence("jet chord iteration did not settle".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{lambda0_quadratic, lambda0_series};

    #[test]
    fn zero_phase_is_neutral() {
        let p = DiffusivityProfile::new(vec![1.0, 2.0, 3.0]).unwrap();
        let g = PatchGeometry::new(4, 1, 1.0, 10).unwrap();
        let m = slow_eigenvalue(&p, &g, &CouplingSpec::default(), 0.0, true).unwrap();
        assert_eq!(m.lambda, Complex64::new(0.0, 0.0));
        assert!((m.amplitude(&g) - 1.0).norm() < 1e-15);
        assert!(slow_eigenvalue(&p, &g, &CouplingSpec::default(), -0.1, true).is_err());
    }

    #[test]
    fn uniform_leading_coefficient() {
        let p = DiffusivityProfile::uniform(1.7, 2).unwrap();
        let g = PatchGeometry::new(5, 2, 1.0, 12).unwrap();
        let theta = PI / 64.0;
        let m = slow_eigenvalue(&p, &g, &CouplingSpec::default(), theta, true).unwrap();
        let s2 = SymbolValue::from_phase(theta / 12.0).s2();
        assert!((m.lambda.re / s2 - 1.7).abs() < 1e-6);
        assert!(m.lambda.im.abs() < 1e-12);
        assert!((m.amplitude(&g) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn ideal_period_two_matches_quadratic_truncation() {
        // K | (n − b): the patch reproduces the complete-domain evolution
        let p = DiffusivityProfile::new(vec![1.0, 3.0]).unwrap();
        let g = PatchGeometry::new(4, 2, 1.0, 10).unwrap();
        let theta = 0.05;
        let m = slow_eigenvalue(&p, &g, &CouplingSpec::default(), theta, false).unwrap();
        let reference = lambda0_quadratic(&p, SymbolValue::from_phase(theta / 10.0)).unwrap();
        let s2 = SymbolValue::from_phase(theta / 10.0).s2();
        // agreement through s2², the remainder is O(s2³)
        assert!(((m.lambda.re - reference) / s2).abs() < 1e-6);
    }

    #[test]
    fn jet_matches_secant_for_ideal_geometry() {
        let g = PatchGeometry::new(4, 2, 1.0, 10).unwrap();
        let configs = jet_configurations(1.0, &[0.5, -0.5], false);
        let lam = slow_eigenvalue_jet(&configs, &g, &CouplingSpec::default()).unwrap();
        // at x = 1 the diffusivities are (1.5, 0.5)
        let p = DiffusivityProfile::new(vec![1.5, 0.5]).unwrap();
        let series = lambda0_series(&p);
        let sum = |phase: usize| (0..3).map(|e| lam.coeff(e, phase)).sum::<Complex64>();
        // φ-expansion: λ = d2 s2 + d4 s2², s2 = −φ² + φ⁴/12
        let d2 = -sum(2).re;
        let d4 = sum(2).re / 12.0 + sum(4).re;
        // x² truncation: exact only when the true coefficients are quadratic in x
        let eps = 0.02;
        let small = jet_configurations(1.0, &[eps, -eps], false);
        let ls = slow_eigenvalue_jet(&small, &g, &CouplingSpec::default()).unwrap();
        let ps = DiffusivityProfile::new(vec![1.0 + eps, 1.0 - eps]).unwrap();
        let ss = lambda0_series(&ps);
        let d2s = -(0..3).map(|e| ls.coeff(e, 2)).sum::<Complex64>().re;
        assert!((d2s - ss.d2).abs() < 1e-6);
        assert!(d2.is_finite() && d4.is_finite() && series.d2 > 0.0);
    }
}
