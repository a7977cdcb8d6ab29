//! Subcommands of the `patchdyn` binary. Each returns the text it prints
//! and writes its tables under the configured output directory.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::analysis::{
    figure_data, plot_script, read_sweep_csv, sweep_streaming, FigureMode, FigureTable, SweepPlan, SweepRecord,
    SWEEP_FILE,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::lattice::{full_domain_simulate, smallest_magnitude_eigenvalue, MicroField};
use crate::output::{fmt_f64, write_provenance};
use crate::patch::{core_average_full, slow_eigenvalue, MacroField, PatchScheme};
use crate::theory::{char_coeffs, lambda0_quadratic, lambda0_series, quadratic_table, SymbolValue};

pub use crate::selftest::{cmd_selftest, Mutation, SelftestReport};

fn create(dir: &Path, name: &str, provenance: &str) -> Result<(File, PathBuf)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut f = File::create(&path)?;
    write_provenance(&mut f, provenance)?;
    Ok((f, path))
}

fn list(values: &[f64]) -> String {
    values.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" ")
}

/// Characteristic coefficients, means, the small-variation table and `λ0`
/// at the configured phases.
pub fn cmd_coeffs(cfg: &RunConfig) -> Result<String> {
    let p = &cfg.profile;
    let k = p.period();
    let mut text = String::new();
    writeln!(text, "profile          {}", list(p.values())).unwrap();
    writeln!(text, "geometric mean   {}", fmt_f64(p.geometric_mean())).unwrap();
    writeln!(text, "harmonic mean    {}", fmt_f64(p.harmonic_mean())).unwrap();
    let table = quadratic_table(k)?;
    writeln!(text, "d  = {}  d0 = {}  f0 = {}", fmt_f64(table.d), fmt_f64(table.d0), fmt_f64(table.f0)).unwrap();
    writeln!(text, "dk = {}", list(&table.dk)).unwrap();
    writeln!(text, "fk = {}", list(&table.fk)).unwrap();
    let series = lambda0_series(p);
    writeln!(text, "lambda0 ~ {} s2 + {} s2^2", fmt_f64(series.d2), fmt_f64(series.d4)).unwrap();

    let (mut f, path) = create(&cfg.output_dir, "coeffs.csv", &cfg.provenance())?;
    writeln!(f, "phase,q,c_q,lambda0_quadratic,lambda0_bloch")?;
    writeln!(text, "\n{:>10} {:>4} {:>24}", "phase", "q", "c_q").unwrap();
    for &phase in &cfg.phases {
        let symbol = SymbolValue::from_phase(phase);
        let quad = match lambda0_quadratic(p, symbol) {
            Ok(v) => fmt_f64(v),
            Err(Error::OutOfRegime { .. }) => "NaN".into(),
            Err(e) => return Err(e),
        };
        let bloch = fmt_f64(smallest_magnitude_eigenvalue(p, phase));
        for (q, c) in char_coeffs(p, symbol).iter().enumerate() {
            writeln!(f, "{},{q},{},{quad},{bloch}", fmt_f64(phase), fmt_f64(*c))?;
            writeln!(text, "{:>10} {:>4} {:>24}", fmt_f64(phase), q, fmt_f64(*c)).unwrap();
        }
        writeln!(text, "{:>10} lambda0 quadratic {quad}  bloch {bloch}", "").unwrap();
    }
    writeln!(text, "\nwrote {}", path.display()).unwrap();
    Ok(text)
}

/// Patch slow eigenvalue against the quadratic truncation at matched symbols.
/// `residual = (λ_patch − λ_reference) / |s2|`.
pub fn cmd_eigen(cfg: &RunConfig) -> Result<String> {
    let g = &cfg.geometry;
    let (mut f, path) = create(&cfg.output_dir, "eigen.csv", &cfg.provenance())?;
    writeln!(f, "theta,lambda_patch,lambda_reference,residual")?;
    let mut text = format!("{:>22} {:>24} {:>24} {:>12}\n", "theta", "lambda_patch", "lambda_reference", "residual");
    for &theta in &cfg.thetas {
        let symbol = SymbolValue::from_phase(theta / g.macro_ratio() as f64);
        let patch = slow_eigenvalue(&cfg.profile, g, &cfg.coupling, theta, cfg.eigen_ensemble).map(|m| m.lambda.re);
        let reference = lambda0_quadratic(&cfg.profile, symbol);
        let (lp, lr, res) = match (&patch, &reference) {
            (Ok(a), Ok(b)) => {
                let res = if symbol.s2() == 0.0 { a - b } else { (a - b) / symbol.s2().abs() };
                (fmt_f64(*a), fmt_f64(*b), fmt_f64(res))
            }
            _ => {
                for e in [patch.as_ref().err(), reference.as_ref().err()].into_iter().flatten() {
                    eprintln!("warning: theta = {theta}: {e}");
                }
                let show = |r: &Result<f64>| r.as_ref().map(|v| fmt_f64(*v)).unwrap_or_else(|_| "NaN".into());
                (show(&patch), show(&reference), "NaN".into())
            }
        };
        writeln!(f, "{},{lp},{lr},{res}", fmt_f64(theta))?;
        writeln!(text, "{:>22} {:>24} {:>24} {:>12}", fmt_f64(theta), lp, lr, res).unwrap();
    }
    writeln!(text, "wrote {}", path.display()).unwrap();
    Ok(text)
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Divergence between the patch scheme and the core-averaged full lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub times: Vec<f64>,
    pub patch: Vec<Vec<f64>>,
    pub oracle: Vec<Vec<f64>>,
    pub divergence: Vec<f64>,
}

/// Sinusoidal start with `wavelengths` periods across the periodic domain.
pub fn simulate(cfg: &RunConfig) -> Result<SimulationSummary> {
    let g = &cfg.geometry;
    let s = &cfg.simulate;
    let sites = cfg.patches * g.macro_ratio();
    if !sites.is_multiple_of(cfg.profile.period()) {
        return Err(Error::Config {
            key: "geometry.patches".into(),
            reason: format!(
                "patches x macro_ratio = {sites} sites must be a multiple of the period {}",
                cfg.profile.period()
            ),
        });
    }
    let wave = 2.0 * std::f64::consts::PI * s.wavelengths as f64 / sites as f64;
    let mut micro = MicroField::new((0..sites).map(|i| (wave * i as f64).sin()).collect(), g.h())?;
    let u0 = core_average_full(&micro, g, cfg.patches)?;

    let sample_dt = s.duration / s.samples as f64;
    let per_sample = ((sample_dt / s.macro_step) - 1e-9).ceil().max(1.0) as usize;
    let scheme = PatchScheme::new(&cfg.profile, g, &cfg.coupling, sample_dt / per_sample as f64, true)?;
    let mut state = scheme.seed(&MacroField {
        values: u0.clone(),
        spacing: g.macro_spacing(),
        time: 0.0,
    })?;

    let mut out = SimulationSummary {
        times: vec![0.0],
        patch: vec![u0.clone()],
        oracle: vec![u0.clone()],
        divergence: vec![0.0],
    };
    for m in 1..=s.samples {
        for _ in 0..per_sample {
            scheme.step(&mut state)?;
        }
        micro = full_domain_simulate(&micro, &cfg.profile, sample_dt, s.micro_step)?;
        let up = scheme.amplitude(&state).values;
        let uo = core_average_full(&micro, g, cfg.patches)?;
        out.times.push(m as f64 * sample_dt);
        out.divergence.push(rel_l2(&up, &uo));
        out.patch.push(up);
        out.oracle.push(uo);
    }
    Ok(out)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<String> {
    let sum = simulate(cfg)?;
    let prov = cfg.provenance();
    for (name, data) in [("trajectory_patch.csv", &sum.patch), ("trajectory_oracle.csv", &sum.oracle)] {
        let (mut f, _) = create(&cfg.output_dir, name, &prov)?;
        writeln!(f, "t,j,U_j")?;
        for (t, u) in sum.times.iter().zip(data.iter()) {
            for (j, v) in u.iter().enumerate() {
                writeln!(f, "{},{j},{}", fmt_f64(*t), fmt_f64(*v))?;
            }
        }
    }
    let (mut f, _) = create(&cfg.output_dir, "divergence.csv", &prov)?;
    writeln!(f, "t,relative_l2")?;
    let mut text = format!("{:>20} {:>24}\n", "t", "relative L2");
    for (t, d) in sum.times.iter().zip(&sum.divergence) {
        writeln!(f, "{},{}", fmt_f64(*t), fmt_f64(*d))?;
        writeln!(text, "{:>20} {:>24}", fmt_f64(*t), fmt_f64(*d)).unwrap();
    }
    writeln!(text, "wrote trajectories to {}", cfg.output_dir.display()).unwrap();
    Ok(text)
}

fn write_figures(records: &[SweepRecord], dir: &Path, provenance: &str) -> Result<Vec<FigureTable>> {
    let mut out = Vec::new();
    for mode in [FigureMode::Fig3, FigureMode::Fig4] {
        let table = figure_data(records, mode);
        let csv = format!("{}.csv", mode.name());
        table.write_csv(&dir.join(&csv), provenance)?;
        fs::write(dir.join(format!("{}.py", mode.name())), plot_script(mode, &csv))?;
        out.push(table);
    }
    Ok(out)
}

fn figure_summary(tables: &[FigureTable]) -> String {
    let mut text = String::new();
    for t in tables {
        writeln!(text, "{}: minimum mean |delta d0| per n", t.mode.name()).unwrap();
        let mut ns: Vec<usize> = t.points.iter().map(|p| p.n).collect();
        ns.dedup();
        for n in ns {
            match t.argmin(n) {
                Some((b, y)) => writeln!(text, "  n = {n:>2}  b = {b:>2}  b/(n-1) = {:.3}  {}", b as f64 / (n - 1) as f64, fmt_f64(y)).unwrap(),
                None => writeln!(text, "  n = {n:>2}  incomplete").unwrap(),
            }
        }
    }
    text
}

/// Resumable `(K, n, b)` sweep followed by both figure tables.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<String> {
    let sp = &cfg.sweep;
    let mut plan = SweepPlan::new(sp.periods.0..=sp.periods.1, sp.n.0..=sp.n.1, cfg.coupling)?;
    plan.use_ensemble = sp.use_ensemble;
    let prov = cfg.provenance();
    let records = sweep_streaming(&plan, &cfg.output_dir, &prov)?;
    let failed = records.iter().filter(|r| r.delta_dk.is_none()).count();
    let tables = write_figures(&records, &cfg.output_dir, &prov)?;
    let mut text = format!("{} cells, {failed} failed\n", records.len());
    text.push_str(&figure_summary(&tables));
    Ok(text)
}

/// Rebuilds the figure tables and a summary from an existing sweep CSV.
pub fn cmd_report(cfg: &RunConfig) -> Result<String> {
    let path = cfg.output_dir.join(SWEEP_FILE);
    if !path.exists() {
        return Err(Error::InvalidArgument(format!("no sweep results at {}", path.display())));
    }
    let records = read_sweep_csv(&path)?;
    let prov = cfg.provenance();
    let tables = write_figures(&records, &cfg.output_dir, &prov)?;
    let mut text = figure_summary(&tables);
    let ideal: Vec<&SweepRecord> = records.iter().filter(|r| r.ideal_nb).collect();
    let worst = ideal
        .iter()
        .filter_map(|r| r.delta_dk.as_ref())
        .flatten()
        .fold(0.0f64, |m, x| m.max(*x));
    writeln!(text, "K | (n - b) cells: {}  largest |delta d_k| {}", ideal.len(), fmt_f64(worst)).unwrap();
    let (mut f, _) = create(&cfg.output_dir, "summary.txt", &prov)?;
    f.write_all(text.as_bytes())?;
    Ok(text)
}
