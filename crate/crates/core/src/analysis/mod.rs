//! Patch-side coefficient extraction, the relative error metric and the
//! `(K, n, b)` sweep behind the buffer-size figures.

mod extract;
mod figure;
mod sweep;

pub use extract::{
    delta_dk, delta_fk, extract_coefficients, extract_coefficients_with, slow_eigenvalue_series,
    CoefficientExtraction, ExtractionMethod,
};
pub use figure::{figure_data, plot_script, FigureMode, FigurePoint, FigureTable};
pub use sweep::{
    read_sweep_csv, run_cell, sweep, sweep_streaming, write_sweep_csv, SweepCell, SweepPlan, SweepRecord,
    PARTIAL_FILE, SWEEP_FILE,
};
