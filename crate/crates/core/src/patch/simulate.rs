use nalgebra::{DMatrix, DVector};

use super::coupling::{coupling_targets_all, min_patches, MacroField};
use super::geometry::{CouplingSpec, PatchGeometry};
use crate::error::{invalid, Error, Result};
use crate::lattice::{make_ensemble, DiffusivityProfile, EnsembleConfigurationSet, MicroField};

/// Trapezoidal substeps per macro step.
pub const SUBSTEPS: usize = 8;

/// Microscale fields `u_{j,i,e}` stored as `fields[j][e][i + n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchEnsembleState {
    pub fields: Vec<Vec<Vec<f64>>>,
    pub time: f64,
}

impl PatchEnsembleState {
    /// Every patch constant at its macroscale value.
    pub fn seeded(u0: &MacroField, geom: &PatchGeometry, configurations: usize) -> Self {
        let fields = u0
            .values
            .iter()
            .map(|&u| vec![vec![u; geom.sites()]; configurations])
            .collect();
        Self { fields, time: u0.time }
    }

    pub fn patches(&self) -> usize {
        self.fields.len()
    }
}

/// Interior derivatives and the eliminated edge values `(u_{−n}, u_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedRhs {
    /// `derivatives[j][e][i + n − 1]` for `|i| < n`.
    pub derivatives: Vec<Vec<Vec<f64>>>,
    pub edges: Vec<Vec<(f64, f64)>>,
}

/// Edge values that make both buffer averages equal their targets.
pub fn eliminate_edges(u: &[f64], geom: &PatchGeometry, targets: (f64, f64)) -> (f64, f64) {
    let n = geom.n() as i64;
    let width = (2 * geom.b() + 1) as f64;
    let left: f64 = geom.left_buffer().filter(|&i| i != -n).map(|i| u[geom.index(i)]).sum();
    let right: f64 = geom.right_buffer().filter(|&i| i != n).map(|i| u[geom.index(i)]).sum();
    (width * targets.0 - left, width * targets.1 - right)
}

fn check_shape(state: &PatchEnsembleState, geom: &PatchGeometry, ensemble: &EnsembleConfigurationSet) -> Result<()> {
    for patch in &state.fields {
        if patch.len() != ensemble.len() || patch.iter().any(|f| f.len() != geom.sites()) {
            return invalid("patch state does not match geometry and ensemble");
        }
    }
    Ok(())
}

pub fn patch_rhs_reduced(
    state: &PatchEnsembleState,
    targets: &[(f64, f64)],
    geom: &PatchGeometry,
    ensemble: &EnsembleConfigurationSet,
) -> Result<ReducedRhs> {
    check_shape(state, geom, ensemble)?;
    if targets.len() != state.patches() {
        return invalid(format!("{} targets for {} patches", targets.len(), state.patches()));
    }
    let n = geom.n() as i64;
    let inv_h2 = 1.0 / (geom.h() * geom.h());
    let mut derivatives = Vec::with_capacity(state.patches());
    let mut edges = Vec::with_capacity(state.patches());
    for (patch, &t) in state.fields.iter().zip(targets) {
        let mut pd = Vec::with_capacity(ensemble.len());
        let mut pe = Vec::with_capacity(ensemble.len());
        for (u, config) in patch.iter().zip(ensemble.configurations()) {
            let (ul, ur) = eliminate_edges(u, geom, t);
            let mut full = u.clone();
            full[0] = ul;
            full[geom.sites() - 1] = ur;
            let d = ((-n + 1)..n)
                .map(|i| {
                    let k = geom.index(i);
                    (config.link(i) * (full[k + 1] - full[k]) + config.link(i - 1) * (full[k - 1] - full[k])) * inv_h2
                })
                .collect();
            pd.push(d);
            pe.push((ul, ur));
        }
        derivatives.push(pd);
        edges.push(pe);
    }
    Ok(ReducedRhs { derivatives, edges })
}

/// Macroscale amplitudes: weighted ensemble mean of the core averages.
pub fn amplitude(state: &PatchEnsembleState, geom: &PatchGeometry, ensemble: &EnsembleConfigurationSet) -> MacroField {
    let total = ensemble.total_weight() as f64;
    let width = (2 * geom.b() + 1) as f64;
    let values = state
        .fields
        .iter()
        .map(|patch| {
            patch
                .iter()
                .zip(ensemble.multiplicities())
                .map(|(u, &m)| m as f64 * geom.core().map(|i| u[geom.index(i)]).sum::<f64>() / width)
                .sum::<f64>()
                / total
        })
        .collect();
    MacroField {
        values,
        spacing: geom.macro_spacing(),
        time: state.time,
    }
}

/// One-macro-step affine map `y ↦ S y + s_L T_L + s_R T_R` on the interior.
#[derive(Debug, Clone)]
struct StepMap {
    s: DMatrix<f64>,
    left: DVector<f64>,
    right: DVector<f64>,
}

fn step_map(config: &DiffusivityProfile, geom: &PatchGeometry, macro_step: f64) -> Result<StepMap> {
    let n = geom.n() as i64;
    let m = 2 * geom.n() - 1;
    let width = (2 * geom.b() + 1) as f64;
    let inv_h2 = 1.0 / (geom.h() * geom.h());
    // full sites in terms of interior unknowns and the two targets
    let mut p = DMatrix::<f64>::zeros(geom.sites(), m);
    let mut ql = DVector::<f64>::zeros(geom.sites());
    let mut qr = DVector::<f64>::zeros(geom.sites());
    for i in (-n + 1)..n {
        p[(geom.index(i), geom.index(i) - 1)] = 1.0;
    }
    ql[0] = width;
    qr[geom.sites() - 1] = width;
    for i in geom.left_buffer().filter(|&i| i != -n) {
        p[(0, geom.index(i) - 1)] = -1.0;
    }
    for i in geom.right_buffer().filter(|&i| i != n) {
        p[(geom.sites() - 1, geom.index(i) - 1)] = -1.0;
    }
    let mut l = DMatrix::<f64>::zeros(m, geom.sites());
    for i in (-n + 1)..n {
        let row = geom.index(i) - 1;
        let k = geom.index(i);
        let (kr, kl) = (config.link(i), config.link(i - 1));
        l[(row, k - 1)] += kl * inv_h2;
        l[(row, k + 1)] += kr * inv_h2;
        l[(row, k)] -= (kr + kl) * inv_h2;
    }
    let a = &l * &p;
    let gl = &l * &ql;
    let gr = &l * &qr;

    let dt = macro_step / SUBSTEPS as f64;
    let id = DMatrix::<f64>::identity(m, m);
    let lu = (&id - &a * (0.5 * dt)).lu();
    let one_s = lu
        .solve(&(&id + &a * (0.5 * dt)))
        .ok_or_else(|| Error::Singular("trapezoidal step matrix".into()))?;
    let one_l = lu.solve(&(gl * dt)).ok_or_else(|| Error::Singular("trapezoidal step matrix".into()))?;
    let one_r = lu.solve(&(gr * dt)).ok_or_else(|| Error::Singular("trapezoidal step matrix".into()))?;
    let mut s = id;
    let mut left = DVector::zeros(m);
    let mut right = DVector::zeros(m);
    for _ in 0..SUBSTEPS {
        left = &one_s * left + &one_l;
        right = &one_s * right + &one_r;
        s = &one_s * s;
    }
    Ok(StepMap { s, left, right })
}

/// Patch scheme with frozen-target macro steps.
#[derive(Debug, Clone)]
pub struct PatchScheme {
    geom: PatchGeometry,
    spec: CouplingSpec,
    ensemble: EnsembleConfigurationSet,
    macro_step: f64,
    maps: Vec<StepMap>,
}

impl PatchScheme {
    pub fn new(
        profile: &DiffusivityProfile,
        geom: &PatchGeometry,
        spec: &CouplingSpec,
        macro_step: f64,
        use_ensemble: bool,
    ) -> Result<Self> {
        if !(macro_step.is_finite() && macro_step > 0.0) {
            return invalid(format!("macro step must be positive, got {macro_step}"));
        }
        let ensemble = if use_ensemble {
            make_ensemble(profile)
        } else {
            EnsembleConfigurationSet::single(profile)
        };
        let maps = ensemble
            .configurations()
            .iter()
            .map(|c| step_map(c, geom, macro_step))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            geom: *geom,
            spec: *spec,
            ensemble,
            macro_step,
            maps,
        })
    }

    pub fn geometry(&self) -> &PatchGeometry {
        &self.geom
    }

    pub fn ensemble(&self) -> &EnsembleConfigurationSet {
        &self.ensemble
    }

    pub fn macro_step(&self) -> f64 {
        self.macro_step
    }

    pub fn seed(&self, u0: &MacroField) -> Result<PatchEnsembleState> {
        if u0.len() < min_patches(&self.spec) {
            return invalid(format!(
                "need at least {} periodic patches, got {}",
                min_patches(&self.spec),
                u0.len()
            ));
        }
        Ok(PatchEnsembleState::seeded(u0, &self.geom, self.ensemble.len()))
    }

    pub fn amplitude(&self, state: &PatchEnsembleState) -> MacroField {
        amplitude(state, &self.geom, &self.ensemble)
    }

    /// Targets from the current amplitude, then one macro step of every
    /// patch and configuration with those targets frozen.
    pub fn step(&self, state: &mut PatchEnsembleState) -> Result<()> {
        check_shape(state, &self.geom, &self.ensemble)?;
        let u = self.amplitude(state);
        let targets = coupling_targets_all(&u, &self.geom, &self.spec)?;
        let m = 2 * self.geom.n() - 1;
        for (patch, &t) in state.fields.iter_mut().zip(&targets) {
            for (field, map) in patch.iter_mut().zip(&self.maps) {
                let y = DVector::from_iterator(m, field[1..m + 1].iter().copied());
                let next = &map.s * y + &map.left * t.0 + &map.right * t.1;
                if next.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Consistency(format!(
                        "patch integration produced non-finite values at t = {}",
                        state.time
                    )));
                }
                field[1..m + 1].copy_from_slice(next.as_slice());
                let (ul, ur) = eliminate_edges(field, &self.geom, t);
                field[0] = ul;
                field[m + 1] = ur;
            }
        }
        state.time += self.macro_step;
        Ok(())
    }
}

/// Runs the scheme from constant-per-patch seeds with the full ensemble.
/// Returns the amplitude after every macro step, starting with `u0`.
pub fn run_patch_simulation(
    u0: &MacroField,
    profile: &DiffusivityProfile,
    geom: &PatchGeometry,
    spec: &CouplingSpec,
    duration: f64,
    macro_step: f64,
) -> Result<Vec<MacroField>> {
    if !(duration.is_finite() && duration >= 0.0) {
        return invalid(format!("duration must be non-negative, got {duration}"));
    }
    if !(macro_step.is_finite() && macro_step > 0.0) {
        return invalid(format!("macro step must be positive, got {macro_step}"));
    }
    let steps = (duration / macro_step - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps == 0 { macro_step } else { duration / steps as f64 };
    let scheme = PatchScheme::new(profile, geom, spec, dt, true)?;
    let mut state = scheme.seed(u0)?;
    let mut out = vec![u0.clone()];
    for _ in 0..steps {
        scheme.step(&mut state)?;
        out.push(scheme.amplitude(&state));
    }
    Ok(out)
}

/// Core averages of a full periodic lattice field at patch centres `j N`.
pub fn core_average_full(field: &MicroField, geom: &PatchGeometry, patches: usize) -> Result<Vec<f64>> {
    let len = field.len();
    if len != patches * geom.macro_ratio() {
        return invalid(format!(
            "full field of {len} sites does not span {patches} patches of {} sites",
            geom.macro_ratio()
        ));
    }
    let width = (2 * geom.b() + 1) as f64;
    Ok((0..patches)
        .map(|j| {
            let centre = (j * geom.macro_ratio()) as i64;
            geom.core()
                .map(|i| field.sites[(centre + i).rem_euclid(len as i64) as usize])
                .sum::<f64>()
                / width
        })
        .collect())
}
