//! Seeded pass/fail matrix over oracle checks and invariants.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{delta_dk, extract_coefficients};
use crate::error::{Error, Result};
use crate::lattice::{char_poly_bruteforce, make_ensemble, smallest_magnitude_eigenvalue, DiffusivityProfile};
use crate::patch::{conversion_series, slow_eigenvalue, ConversionDirection, CouplingSpec, MacroField, PatchGeometry, PatchScheme};
use crate::theory::{char_coeffs, lambda0_quadratic, lambda0_series, SymbolValue};

/// Deliberate fault injected into the harness to show a row can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Flip the sign of `c_0` before comparing with the brute-force determinant.
    C0Sign,
}

impl FromStr for Mutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Mutation::None),
            "c0-sign" => Ok(Mutation::C0Sign),
            _ => Err(Error::InvalidArgument(format!("unknown mutation {s:?} (none, c0-sign)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
}

impl Row {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub seed: u64,
    pub rows: Vec<Row>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(Row::passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!("selftest seed={}\n", self.seed);
        for r in &self.rows {
            let tag = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(s, "{tag}  {:<28} worst {:.3e}  tol {:.1e}", r.name, r.worst, r.tolerance).unwrap();
        }
        let failed = self.rows.iter().filter(|r| !r.passed()).count();
        writeln!(s, "{} rows, {failed} failed", self.rows.len()).unwrap();
        s
    }
}

fn random_profile(rng: &mut ChaCha8Rng, k: usize) -> DiffusivityProfile {
    DiffusivityProfile::new((0..k).map(|_| rng.gen_range(0.2..5.0)).collect()).expect("positive values")
}

fn failed_row(name: &'static str, tolerance: f64, e: Error) -> Row {
    eprintln!("selftest {name}: {e}");
    Row { name, worst: f64::INFINITY, tolerance }
}

fn row(name: &'static str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> Row {
    match f() {
        Ok(worst) if worst.is_finite() => Row { name, worst, tolerance },
        Ok(_) => failed_row(name, tolerance, Error::Consistency("non-finite residual".into())),
        Err(e) => failed_row(name, tolerance, e),
    }
}

pub fn selftest(seed: u64, mutation: Mutation) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(DiffusivityProfile, f64)> = (0..24)
        .map(|i| {
            let k = 2 + i % 7;
            (random_profile(&mut rng, k), rng.gen_range(0.0..std::f64::consts::PI))
        })
        .collect();
    let mut rows = Vec::new();

    rows.push(row("char coeffs vs determinant", 1e-9, || {
        let mut worst = 0.0f64;
        for (p, phase) in &cases {
            let mut c = char_coeffs(p, SymbolValue::from_phase(*phase));
            if mutation == Mutation::C0Sign {
                c[0] = -c[0];
            }
            let b = char_poly_bruteforce(p, *phase)?;
            let scale = b.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            for (x, y) in c.iter().zip(&b) {
                worst = worst.max((x - y).abs() / scale);
            }
        }
        Ok(worst)
    }));

    rows.push(row("quadratic root vs Bloch", 1e-3, || {
        // relative to |s2|, the truncation error is O(s2^2)
        let mut worst = 0.0f64;
        for (p, _) in &cases {
            let phase = 0.02;
            let s = SymbolValue::from_phase(phase);
            let q = lambda0_quadratic(p, s)?;
            worst = worst.max((q - smallest_magnitude_eigenvalue(p, phase)).abs() / s.s2().abs());
        }
        Ok(worst)
    }));

    rows.push(row("series order vs quadratic", 0.5, || {
        // the gap is O(s2^3): halving the phase divides it by 64
        let mut worst = 0.0f64;
        for (p, _) in &cases {
            let gap = |phase: f64| -> Result<f64> {
                let s = SymbolValue::from_phase(phase);
                Ok((lambda0_quadratic(p, s)? - lambda0_series(p).eval(s)).abs())
            };
            let (a, b) = (gap(0.04)?, gap(0.02)?);
            if a > 1e-13 {
                worst = worst.max((6.0 - (a / b).log2()).abs());
            }
        }
        Ok(worst)
    }));

    rows.push(row("ensemble symmetry", 1e-12, || {
        let mut worst = 0.0f64;
        for (p, phase) in &cases {
            let s = SymbolValue::from_phase(*phase);
            let base = char_coeffs(p, s);
            let ens = make_ensemble(p);
            if ens.total_weight() != 2 * p.period() {
                return Err(Error::Consistency(format!("ensemble weight {}", ens.total_weight())));
            }
            for (q, _) in ens.iter() {
                for (x, y) in char_coeffs(q, s).iter().zip(&base) {
                    worst = worst.max((x - y).abs() / y.abs().max(1.0));
                }
            }
        }
        Ok(worst)
    }));

    let spec = CouplingSpec::default();
    rows.push(row("patch eigenvalue, ideal cell", 1e-5, || {
        // K = 2 with K | (n - b): the patch reproduces the lattice
        let geom = PatchGeometry::for_sweep(3, 1)?;
        let mut worst = 0.0f64;
        for (p, _) in cases.iter().filter(|(p, _)| p.period() == 2) {
            let theta = 0.05;
            let mode = slow_eigenvalue(p, &geom, &spec, theta, true)?;
            let s = SymbolValue::from_phase(theta / geom.macro_ratio() as f64);
            let q = lambda0_quadratic(p, s)?;
            worst = worst.max((mode.lambda.re - q).abs() / s.s2().abs());
        }
        Ok(worst)
    }));

    rows.push(row("constant fixed point", 1e-12, || {
        let geom = PatchGeometry::new(3, 1, 1.0, 8)?;
        let (p, _) = &cases[1];
        let scheme = PatchScheme::new(p, &geom, &spec, 0.02, true)?;
        let u0 = MacroField { values: vec![1.25; 8], spacing: geom.macro_spacing(), time: 0.0 };
        let mut state = scheme.seed(&u0)?;
        for _ in 0..20 {
            scheme.step(&mut state)?;
        }
        Ok(scheme.amplitude(&state).values.iter().fold(0.0f64, |m, v| m.max((v - 1.25).abs())))
    }));

    rows.push(row("operator conversion parity", 1e-12, || {
        let geom = PatchGeometry::new(4, 2, 1.0, 10)?;
        let mut worst = 0.0f64;
        for dir in [ConversionDirection::MicroToMacro, ConversionDirection::MacroToMicro] {
            let r = conversion_series(dir, 8, &geom)?;
            worst = worst.max(r.parity_defect).max(r.zero_phase_residual.abs());
        }
        Ok(worst)
    }));

    rows.push(row("extraction, ideal cells", 1e-9, || {
        let mut worst = 0.0f64;
        for (k, n, b) in [(2usize, 4usize, 2usize), (3, 5, 2), (4, 6, 2)] {
            let geom = PatchGeometry::for_sweep(n, b)?;
            let e = extract_coefficients(k, &geom, &spec, true)?;
            worst = delta_dk(&e, k)?.iter().fold(worst, |m, d| m.max(d.abs()));
        }
        Ok(worst)
    }));

    SelftestReport { seed, rows }
}

/// Renders the matrix; an error when any row fails.
pub fn cmd_selftest(seed: u64, mutation: Mutation) -> Result<String> {
    let report = selftest(seed, mutation);
    let text = report.render();
    if report.passed() {
        Ok(text)
    } else {
        print!("{text}");
        Err(Error::Consistency("selftest failed".into()))
    }
}
