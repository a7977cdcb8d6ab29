//! Microscale lattice diffusion: profiles, symmetry ensembles, the full
//! periodic reference integrator and the one-period Bloch operator.

mod bloch;
mod ensemble;
mod micro;
mod profile;

pub use bloch::{
    bloch_eigenvalues, bloch_matrix, char_poly_bruteforce, smallest_magnitude_eigenvalue,
    BRUTEFORCE_MAX_PERIOD, IMAG_TOLERANCE,
};
pub use ensemble::{make_ensemble, symmetry_maps, EnsembleConfigurationSet};
pub use micro::{full_domain_simulate, micro_rhs, stability_bound, MicroField};
pub use profile::{DiffusivityProfile, VariationProfile, MODERATE_VARIATION_LIMIT};
