use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::ops::RangeInclusive;
use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;

use super::extract::{delta_dk, extract_coefficients};
use crate::error::{invalid, Error, Result};
use crate::output::{fmt_f64, write_provenance};
use crate::patch::{CouplingSpec, PatchGeometry};

pub const SWEEP_FILE: &str = "sweep.csv";
pub const PARTIAL_FILE: &str = "sweep.partial.csv";
/// Values per `k`, failed flag, `ideal_nb`, `ideal_2b1`.
type PartialCell = (Vec<(usize, f64)>, bool, bool, bool);

const HEADER: &str = "K,n,b,k,delta_dk,ideal_nb,ideal_2b1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SweepCell {
    pub period: usize,
    pub n: usize,
    pub b: usize,
}

impl SweepCell {
    pub fn ideal_nb(&self) -> bool {
        (self.n - self.b).is_multiple_of(self.period)
    }

    pub fn ideal_2b1(&self) -> bool {
        (2 * self.b + 1).is_multiple_of(self.period)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub cell: SweepCell,
    /// `|Δd_k|` for `k = 0..=⌊K/2⌋`, `None` when extraction failed.
    pub delta_dk: Option<Vec<f64>>,
    pub ideal_nb: bool,
    pub ideal_2b1: bool,
}

/// Grid of `(K, n, b)` cells with every `0 ≤ b < n`.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub periods: RangeInclusive<usize>,
    pub ns: RangeInclusive<usize>,
    pub spec: CouplingSpec,
    pub use_ensemble: bool,
}

impl SweepPlan {
    pub fn new(periods: RangeInclusive<usize>, ns: RangeInclusive<usize>, spec: CouplingSpec) -> Result<Self> {
        if *periods.start() < 2 || *periods.end() > 12 || periods.is_empty() {
            return invalid(format!("sweep periods must lie in 2..=12, got {periods:?}"));
        }
        if *ns.start() < 2 || *ns.end() > 12 || ns.is_empty() {
            return invalid(format!("sweep patch half-widths must lie in 2..=12, got {ns:?}"));
        }
        Ok(Self {
            periods,
            ns,
            spec,
            use_ensemble: true,
        })
    }

    /// Sorted by `(K, n, b)`.
    pub fn cells(&self) -> Vec<SweepCell> {
        let mut out = Vec::new();
        for period in self.periods.clone() {
            for n in self.ns.clone() {
                for b in 0..n {
                    out.push(SweepCell { period, n, b });
                }
            }
        }
        out
    }
}

pub fn run_cell(cell: SweepCell, spec: &CouplingSpec, use_ensemble: bool) -> SweepRecord {
    let result = PatchGeometry::for_sweep(cell.n, cell.b)
        .and_then(|g| extract_coefficients(cell.period, &g, spec, use_ensemble))
        .and_then(|e| delta_dk(&e, cell.period));
    let delta_dk = match result {
        Ok(d) => Some(d.into_iter().map(f64::abs).collect()),
        Err(e) => {
            eprintln!("warning: sweep cell K={} n={} b={} failed: {e}", cell.period, cell.n, cell.b);
            None
        }
    };
    SweepRecord {
        cell,
        delta_dk,
        ideal_nb: cell.ideal_nb(),
        ideal_2b1: cell.ideal_2b1(),
    }
}

/// Every cell of the plan, in parallel, returned in `(K, n, b)` order.
pub fn sweep(plan: &SweepPlan) -> Vec<SweepRecord> {
    plan.cells()
        .into_par_iter()
        .map(|c| run_cell(c, &plan.spec, plan.use_ensemble))
        .collect()
}

fn record_lines(r: &SweepRecord) -> Vec<String> {
    let flag = |b: bool| if b { "1" } else { "0" };
    let prefix = format!("{},{},{}", r.cell.period, r.cell.n, r.cell.b);
    let tail = format!("{},{}", flag(r.ideal_nb), flag(r.ideal_2b1));
    match &r.delta_dk {
        Some(d) => d
            .iter()
            .enumerate()
            .map(|(k, x)| format!("{prefix},{k},{},{tail}", fmt_f64(*x)))
            .collect(),
        None => vec![format!("{prefix},NA,NaN,{tail}")],
    }
}

pub fn write_sweep_csv(path: &Path, records: &[SweepRecord], provenance: &str) -> Result<()> {
    let mut out = File::create(path)?;
    write_provenance(&mut out, provenance)?;
    writeln!(out, "{HEADER}")?;
    for r in records {
        for line in record_lines(r) {
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

fn parse_flag(s: &str, line: usize) -> Result<bool> {
    match s {
        "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        _ => Err(Error::Consistency(format!("line {line}: bad flag {s:?}"))),
    }
}

/// Reads records back, keeping only cells whose rows are complete.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(File::open(path)?);
    let mut cells: BTreeMap<SweepCell, PartialCell> = BTreeMap::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        if row.len() != 7 {
            // torn trailing line of an interrupted run
            continue;
        }
        let line = idx + 2;
        let num = |i: usize| -> Result<usize> {
            row[i]
                .parse()
                .map_err(|_| Error::Consistency(format!("line {line}: bad integer {:?}", &row[i])))
        };
        let cell = SweepCell {
            period: num(0)?,
            n: num(1)?,
            b: num(2)?,
        };
        let entry = cells
            .entry(cell)
            .or_insert((Vec::new(), false, parse_flag(&row[5], line)?, parse_flag(&row[6], line)?));
        if &row[3] == "NA" {
            entry.1 = true;
        } else {
            let value: f64 = row[4]
                .parse()
                .map_err(|_| Error::Consistency(format!("line {line}: bad value {:?}", &row[4])))?;
            entry.0.push((num(3)?, value));
        }
    }
    let mut out = Vec::new();
    for (cell, (mut values, failed, ideal_nb, ideal_2b1)) in cells {
        values.sort_by_key(|(k, _)| *k);
        let complete = values.len() == cell.period / 2 + 1 && values.iter().enumerate().all(|(i, (k, _))| i == *k);
        let delta_dk = if failed {
            None
        } else if complete {
            Some(values.into_iter().map(|(_, v)| v).collect())
        } else {
            continue;
        };
        out.push(SweepRecord {
            cell,
            delta_dk,
            ideal_nb,
            ideal_2b1,
        });
    }
    Ok(out)
}

/// Sweep that streams finished cells to `dir/sweep.partial.csv`, skips
/// cells already present there, and finally writes the ordered
/// `dir/sweep.csv` and removes the partial file.
pub fn sweep_streaming(plan: &SweepPlan, dir: &Path, provenance: &str) -> Result<Vec<SweepRecord>> {
    fs::create_dir_all(dir)?;
    let partial = dir.join(PARTIAL_FILE);
    let mut done: Vec<SweepRecord> = Vec::new();
    if partial.exists() {
        let first = BufReader::new(File::open(&partial)?).lines().next().transpose()?;
        if first.as_deref() == Some(provenance) {
            done = read_sweep_csv(&partial)?;
        } else {
            eprintln!("warning: ignoring {} from a different configuration", partial.display());
        }
    }
    let wanted = plan.cells();
    done.retain(|r| wanted.binary_search(&r.cell).is_ok());
    // rewrite without torn or foreign rows before appending
    write_sweep_csv(&partial, &done, provenance)?;
    let todo: Vec<SweepCell> = wanted
        .iter()
        .copied()
        .filter(|c| !done.iter().any(|r| r.cell == *c))
        .collect();
    let sink = Mutex::new(OpenOptions::new().append(true).open(&partial)?);
    let fresh: Vec<SweepRecord> = todo
        .into_par_iter()
        .map(|c| -> Result<SweepRecord> {
            let r = run_cell(c, &plan.spec, plan.use_ensemble);
            let mut text = record_lines(&r).join("\n");
            text.push('\n');
            let mut f = sink.lock().expect("sweep sink poisoned");
            f.write_all(text.as_bytes())?;
            f.flush()?;
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    done.extend(fresh);
    done.sort_by_key(|r| r.cell);
    write_sweep_csv(&dir.join(SWEEP_FILE), &done, provenance)?;
    fs::remove_file(&partial)?;
    Ok(done)
}
