//! Gap-tooth scheme: patches of microscale lattice coupled through
//! interpolated buffer averages.

mod conversion;
mod coupling;
mod eigen;
mod geometry;
mod secular;
mod simulate;

pub use conversion::{conversion_series, ConversionDirection, ConversionReport};
pub use coupling::{coupling_symbols, coupling_targets, coupling_targets_all, min_patches, MacroField};
pub(crate) use eigen::{jet_configurations, slow_eigenvalue_jet};
pub use eigen::{slow_eigenvalue, SlowMode};
pub use geometry::{CouplingSpec, PatchGeometry};
pub use simulate::{
    amplitude, core_average_full, eliminate_edges, patch_rhs_reduced, run_patch_simulation, PatchEnsembleState,
    PatchScheme, ReducedRhs, SUBSTEPS,
};
