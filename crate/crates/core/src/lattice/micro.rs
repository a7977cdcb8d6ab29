use super::profile::DiffusivityProfile;
use crate::error::{invalid, Error, Result};

/// Field values on a periodic stretch of the microscale lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroField {
    pub sites: Vec<f64>,
    pub spacing: f64,
    pub time: f64,
}

impl MicroField {
    pub fn new(sites: Vec<f64>, spacing: f64) -> Result<Self> {
        if sites.is_empty() {
            return invalid("micro field needs at least one site");
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return invalid(format!("lattice spacing must be positive, got {spacing}"));
        }
        Ok(Self {
            sites,
            spacing,
            time: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.sites.iter().sum()
    }
}

fn check_periodic(field: &MicroField, profile: &DiffusivityProfile) -> Result<()> {
    if !(field.spacing.is_finite() && field.spacing > 0.0) {
        return invalid(format!("lattice spacing must be positive, got {}", field.spacing));
    }
    if field.sites.is_empty() || !field.sites.len().is_multiple_of(profile.period()) {
        return invalid(format!(
            "periodic field length {} is not a positive multiple of the period {}",
            field.sites.len(),
            profile.period()
        ));
    }
    Ok(())
}

fn rhs_into(u: &[f64], profile: &DiffusivityProfile, inv_h2: f64, out: &mut [f64]) {
    let len = u.len();
    let k = profile.values();
    let period = k.len();
    for i in 0..len {
        let right = u[(i + 1) % len];
        let left = u[(i + len - 1) % len];
        let k_right = k[i % period];
        let k_left = k[(i + period - 1) % period];
        out[i] = (k_right * (right - u[i]) + k_left * (left - u[i])) * inv_h2;
    }
}

/// Time derivative of every site under periodic lattice diffusion.
pub fn micro_rhs(field: &MicroField, profile: &DiffusivityProfile) -> Result<Vec<f64>> {
    check_periodic(field, profile)?;
    let mut out = vec![0.0; field.len()];
    rhs_into(&field.sites, profile, 1.0 / (field.spacing * field.spacing), &mut out);
    Ok(out)
}

/// Largest explicit step accepted by [`full_domain_simulate`].
pub fn stability_bound(spacing: f64, profile: &DiffusivityProfile) -> f64 {
    0.2 * spacing * spacing / profile.max()
}

/// Integrates the full periodic lattice with classical fourth-order
/// Runge–Kutta. The number of steps is `ceil(duration / step)`, with the
/// step shrunk to land exactly on `duration`.
pub fn full_domain_simulate(
    initial: &MicroField,
    profile: &DiffusivityProfile,
    duration: f64,
    step: f64,
) -> Result<MicroField> {
    check_periodic(initial, profile)?;
    if !(duration.is_finite() && duration >= 0.0) {
        return invalid(format!("duration must be non-negative, got {duration}"));
    }
    let bound = stability_bound(initial.spacing, profile);
    if !(step.is_finite() && step > 0.0 && step <= bound) {
        return Err(Error::UnstableStep { step, bound });
    }
    let steps = (duration / step).ceil() as usize;
    let mut u = initial.sites.clone();
    if steps == 0 {
        return Ok(initial.clone());
    }
    let dt = duration / steps as f64;
    let inv_h2 = 1.0 / (initial.spacing * initial.spacing);
    let len = u.len();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let mut tmp = vec![0.0; len];
    for _ in 0..steps {
        rhs_into(&u, profile, inv_h2, &mut k1);
        for i in 0..len {
            tmp[i] = u[i] + 0.5 * dt * k1[i];
        }
        rhs_into(&tmp, profile, inv_h2, &mut k2);
        for i in 0..len {
            tmp[i] = u[i] + 0.5 * dt * k2[i];
        }
        rhs_into(&tmp, profile, inv_h2, &mut k3);
        for i in 0..len {
            tmp[i] = u[i] + dt * k3[i];
        }
        rhs_into(&tmp, profile, inv_h2, &mut k4);
        for i in 0..len {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(MicroField {
        sites: u,
        spacing: initial.spacing,
        time: initial.time + duration,
    })
}
