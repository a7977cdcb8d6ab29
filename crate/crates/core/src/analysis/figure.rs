use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use super::sweep::{SweepCell, SweepRecord};
use crate::error::Result;
use crate::output::{fmt_f64, write_provenance};

/// Which period range each `(n, b)` point averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureMode {
    /// `2 ≤ K ≤ n`
    Fig3,
    /// `2 ≤ K ≤ 12`
    Fig4,
}

impl FigureMode {
    pub fn name(&self) -> &'static str {
        match self {
            FigureMode::Fig3 => "fig3",
            FigureMode::Fig4 => "fig4",
        }
    }

    pub fn periods(&self, n: usize) -> std::ops::RangeInclusive<usize> {
        match self {
            FigureMode::Fig3 => 2..=n,
            FigureMode::Fig4 => 2..=12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePoint {
    pub n: usize,
    pub b: usize,
    /// `b / (n − 1)`
    pub x: f64,
    /// Mean `|Δd0|` over the mode's periods, `None` when any cell is
    /// missing or failed.
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub mode: FigureMode,
    pub points: Vec<FigurePoint>,
}

impl FigureTable {
    pub fn series(&self, n: usize) -> Vec<&FigurePoint> {
        self.points.iter().filter(|p| p.n == n).collect()
    }

    /// `(b, y)` of the smallest average in one series.
    pub fn argmin(&self, n: usize) -> Option<(usize, f64)> {
        self.series(n)
            .into_iter()
            .filter_map(|p| p.y.map(|y| (p.b, y)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn value(&self, n: usize, b: usize) -> Option<f64> {
        self.points.iter().find(|p| p.n == n && p.b == b).and_then(|p| p.y)
    }

    pub fn write_csv(&self, path: &Path, provenance: &str) -> Result<()> {
        let mut out = std::fs::File::create(path)?;
        write_provenance(&mut out, provenance)?;
        writeln!(out, "n,b,x,y")?;
        for p in &self.points {
            let y = p.y.map(fmt_f64).unwrap_or_else(|| "NA".into());
            writeln!(out, "{},{},{},{}", p.n, p.b, fmt_f64(p.x), y)?;
        }
        Ok(())
    }
}

/// Averages `|Δd0|` per `(n, b)` over every `n` present in the records.
pub fn figure_data(records: &[SweepRecord], mode: FigureMode) -> FigureTable {
    let by_cell: BTreeMap<SweepCell, &SweepRecord> = records.iter().map(|r| (r.cell, r)).collect();
    let mut ns: Vec<usize> = records.iter().map(|r| r.cell.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut points = Vec::new();
    for n in ns {
        for b in 0..n {
            let mut values = Vec::new();
            for period in mode.periods(n) {
                let cell = SweepCell { period, n, b };
                match by_cell.get(&cell).and_then(|r| r.delta_dk.as_ref()) {
                    Some(d) => values.push(d[0]),
                    None => {
                        values.clear();
                        break;
                    }
                }
            }
            let y = (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64);
            points.push(FigurePoint {
                n,
                b,
                x: b as f64 / (n - 1) as f64,
                y,
            });
        }
    }
    FigureTable { mode, points }
}

/// Matplotlib script that plots a figure CSV written next to it.
pub fn plot_script(mode: FigureMode, csv_name: &str) -> String {
    let range = match mode {
        FigureMode::Fig3 => "2 <= K <= n",
        FigureMode::Fig4 => "2 <= K <= 12",
    };
    format!(
        r##"import csv
import matplotlib.pyplot as plt

series = {{}}
with open("{csv_name}") as f:
    rows = csv.DictReader(line for line in f if not line.startswith("#"))
    for row in rows:
        if row["y"] == "NA":
            continue
        series.setdefault(int(row["n"]), []).append((float(row["x"]), float(row["y"])))

fig, ax = plt.subplots()
for n, pts in sorted(series.items()):
    xs, ys = zip(*sorted(pts))
    ax.semilogy(xs, ys, marker="o", label=f"n = {{n}}")
ax.set_xlabel("b / (n - 1)")
ax.set_ylabel("mean |delta d0| over {range}")
ax.legend(fontsize="small")
fig.savefig("{stem}.png", dpi=150)
"##,
        stem = mode.name()
    )
}
