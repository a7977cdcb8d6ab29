//! TOML run configuration.
//!
//! ```toml
//! output_dir = "out"
//! seed = 7
//!
//! [profile]
//! values = [1.0, 3.0]        # or: base = 1.0, eta = [0.1, -0.1]; default [1.0, 2.0]
//!
//! [geometry]
//! n = 6
//! b = 3
//! macro_ratio = 16
//! h = 1.0
//! patches = 8
//!
//! [coupling]
//! gamma = 1.0
//! cutoff = 2
//! ```
//!
//! Each experiment reads its own optional table (`coeffs`, `eigen`,
//! `simulate`, `sweep`). Command-line overrides use dotted keys such as
//! `geometry.b=2`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lattice::{DiffusivityProfile, VariationProfile};
use crate::patch::{min_patches, CouplingSpec, PatchGeometry};

/// Overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "PATCHDYN_OUTPUT_DIR";

fn config_err<T>(key: &str, reason: impl Into<String>) -> Result<T> {
    Err(Error::Config {
        key: key.into(),
        reason: reason.into(),
    })
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    values: Option<Vec<f64>>,
    base: Option<f64>,
    eta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    n: Option<usize>,
    b: Option<usize>,
    macro_ratio: Option<usize>,
    h: Option<f64>,
    patches: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoupling {
    gamma: Option<f64>,
    cutoff: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoeffs {
    phases: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEigen {
    thetas: Option<Vec<f64>>,
    use_ensemble: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulate {
    duration: Option<f64>,
    macro_step: Option<f64>,
    wavelengths: Option<usize>,
    samples: Option<usize>,
    micro_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    periods: Option<[usize; 2]>,
    n: Option<[usize; 2]>,
    use_ensemble: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
    #[serde(default)]
    profile: RawProfile,
    #[serde(default)]
    geometry: RawGeometry,
    #[serde(default)]
    coupling: RawCoupling,
    #[serde(default)]
    coeffs: RawCoeffs,
    #[serde(default)]
    eigen: RawEigen,
    #[serde(default)]
    simulate: RawSimulate,
    #[serde(default)]
    sweep: RawSweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateParams {
    pub duration: f64,
    pub macro_step: f64,
    pub wavelengths: usize,
    pub samples: usize,
    pub micro_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepParams {
    pub periods: (usize, usize),
    pub n: (usize, usize),
    pub use_ensemble: bool,
}

/// Validated configuration plus the canonical text it was built from.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub profile: DiffusivityProfile,
    pub geometry: PatchGeometry,
    pub patches: usize,
    pub coupling: CouplingSpec,
    pub phases: Vec<f64>,
    pub thetas: Vec<f64>,
    pub eigen_ensemble: bool,
    pub simulate: SimulateParams,
    pub sweep: SweepParams,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Effective configuration after overrides, as TOML.
    pub canonical: String,
}

fn set_dotted(table: &mut toml::Table, key: &str, raw: &str) -> Result<()> {
    let value: toml::Value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return config_err(key, "empty key segment");
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = match entry {
            toml::Value::Table(t) => t,
            _ => return config_err(key, format!("`{p}` is not a table")),
        };
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl RunConfig {
    pub fn from_path(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text, overrides)
    }

    /// Parses, applies `key=value` overrides and validates. The output
    /// directory environment variable wins over both.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config {
            key: "<file>".into(),
            reason: e.message().to_string(),
        })?;
        for o in overrides {
            let Some((k, v)) = o.split_once('=') else {
                return config_err(o, "override must look like key=value");
            };
            set_dotted(&mut table, k.trim(), v.trim())?;
        }
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            table.insert("output_dir".into(), toml::Value::String(dir));
        }
        let canonical = toml::to_string(&table).map_err(|e| Error::Config {
            key: "<file>".into(),
            reason: e.to_string(),
        })?;
        let raw: RawConfig = toml::from_str(&canonical).map_err(|e: toml::de::Error| Error::Config {
            key: unknown_key(e.message()).unwrap_or_else(|| "<file>".into()),
            reason: e.message().to_string(),
        })?;
        Self::validate(raw, canonical)
    }

    fn validate(raw: RawConfig, canonical: String) -> Result<Self> {
        let profile = match (&raw.profile.values, raw.profile.base, &raw.profile.eta) {
            (Some(v), None, None) => DiffusivityProfile::new(v.clone())
                .or_else(|e| config_err("profile.values", e.to_string()))?,
            (None, Some(base), Some(eta)) => VariationProfile::new(base, eta.clone())
                .or_else(|e| config_err("profile.eta", e.to_string()))?
                .to_profile(),
            (None, None, None) => DiffusivityProfile::new(vec![1.0, 2.0]).expect("positive values"),
            (Some(_), _, _) => return config_err("profile.values", "give either `values` or `base`/`eta`, not both"),
            (None, _, _) => return config_err("profile.base", "`base` and `eta` go together"),
        };

        let g = &raw.geometry;
        let n = g.n.unwrap_or(6);
        let b = g.b.unwrap_or(n / 2);
        let h = g.h.unwrap_or(1.0);
        let macro_ratio = g.macro_ratio.unwrap_or(2 * n + 2);
        if n == 0 {
            return config_err("geometry.n", "must be positive");
        }
        if b >= n {
            return config_err("geometry.b", format!("must be below n = {n}"));
        }
        if 2 * n + 1 > macro_ratio {
            return config_err("geometry.macro_ratio", format!("must be at least 2n + 1 = {}", 2 * n + 1));
        }
        if !(h.is_finite() && h > 0.0) {
            return config_err("geometry.h", "must be positive");
        }
        let geometry = PatchGeometry::new(n, b, h, macro_ratio).or_else(|e| config_err("geometry", e.to_string()))?;

        let gamma = raw.coupling.gamma.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&gamma) {
            return config_err("coupling.gamma", "must lie in [0, 1]");
        }
        let cutoff = raw.coupling.cutoff.unwrap_or(2);
        if cutoff == 0 {
            return config_err("coupling.cutoff", "must be positive");
        }
        let coupling = CouplingSpec::new(gamma, cutoff).or_else(|e| config_err("coupling", e.to_string()))?;

        let patches = g.patches.unwrap_or(8);
        if patches < min_patches(&coupling) {
            return config_err(
                "geometry.patches",
                format!("need at least {} periodic patches", min_patches(&coupling)),
            );
        }

        let phases = raw.coeffs.phases.unwrap_or_else(|| vec![0.1, 0.5, 1.0]);
        if phases.iter().any(|p| !p.is_finite()) {
            return config_err("coeffs.phases", "must be finite");
        }
        let thetas = raw
            .eigen
            .thetas
            .unwrap_or_else(|| std::iter::once(0.0).chain((0..4).map(|k| PI / 8.0 / f64::powi(2.0, k))).collect());
        if thetas.iter().any(|t| !(0.0..=PI).contains(t)) {
            return config_err("eigen.thetas", "must lie in [0, pi]");
        }

        let s = &raw.simulate;
        let big_h = geometry.macro_spacing();
        let duration = s.duration.unwrap_or(big_h * big_h / (4.0 * profile.harmonic_mean()));
        if !(duration.is_finite() && duration >= 0.0) {
            return config_err("simulate.duration", "must be non-negative");
        }
        let macro_step = s.macro_step.unwrap_or(0.05 * h * h / profile.max());
        if !(macro_step.is_finite() && macro_step > 0.0) {
            return config_err("simulate.macro_step", "must be positive");
        }
        let bound = 0.2 * h * h / profile.max();
        let micro_step = s.micro_step.unwrap_or(0.5 * bound);
        if !(micro_step > 0.0 && micro_step <= bound) {
            return config_err("simulate.micro_step", format!("must lie in (0, {bound}]"));
        }
        let wavelengths = s.wavelengths.unwrap_or(1);
        if wavelengths == 0 || 2 * wavelengths > patches {
            return config_err("simulate.wavelengths", "must lie in 1..=patches/2");
        }
        let samples = s.samples.unwrap_or(8);
        if samples == 0 {
            return config_err("simulate.samples", "must be positive");
        }

        let periods = raw.sweep.periods.unwrap_or([2, 12]);
        if periods[0] < 2 || periods[1] > 12 || periods[0] > periods[1] {
            return config_err("sweep.periods", "must be an ordered pair within [2, 12]");
        }
        let ns = raw.sweep.n.unwrap_or([2, 12]);
        if ns[0] < 2 || ns[1] > 12 || ns[0] > ns[1] {
            return config_err("sweep.n", "must be an ordered pair within [2, 12]");
        }

        Ok(Self {
            profile,
            geometry,
            patches,
            coupling,
            phases,
            thetas,
            eigen_ensemble: raw.eigen.use_ensemble.unwrap_or(true),
            simulate: SimulateParams {
                duration,
                macro_step,
                wavelengths,
                samples,
                micro_step,
            },
            sweep: SweepParams {
                periods: (periods[0], periods[1]),
                n: (ns[0], ns[1]),
                use_ensemble: raw.sweep.use_ensemble.unwrap_or(true),
            },
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            seed: raw.seed.unwrap_or(0),
            canonical,
        })
    }

    pub fn provenance(&self) -> String {
        crate::output::provenance_line(&self.canonical)
    }
}

fn unknown_key(message: &str) -> Option<String> {
    let rest = message.split("unknown field `").nth(1)?;
    Some(rest.split('`').next()?.to_string())
}
