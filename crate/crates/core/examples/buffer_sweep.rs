// A small (K, n, b) sweep written to CSV, then the averaged buffer-width
// error per patch size.

use patchdyn::analysis::{figure_data, sweep_streaming, FigureMode, SweepPlan};
use patchdyn::output::provenance_line;
use patchdyn::patch::CouplingSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("patchdyn-buffer-sweep-{}", std::process::id()));
    let plan = SweepPlan::new(2..=5, 3..=5, CouplingSpec::default())?;
    let records = sweep_streaming(&plan, &dir, &provenance_line("buffer_sweep example"))?;
    println!("{} cells written to {}", records.len(), dir.join("sweep.csv").display());

    let table = figure_data(&records, FigureMode::Fig3);
    for n in 3..=5 {
        let row: Vec<String> = table
            .series(n)
            .iter()
            .map(|p| p.y.map_or("NA".into(), |y| format!("{y:.2e}")))
            .collect();
        println!("n = {n}: {}", row.join("  "));
        if let Some((b, y)) = table.argmin(n) {
            println!("        smallest at b = {b} ({y:.2e})");
        }
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
