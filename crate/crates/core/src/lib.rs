//! Gap-tooth patch dynamics for diffusion on a lattice with periodic
//! diffusivity.

pub mod analysis;
pub mod commands;
pub mod config;
pub mod error;
pub mod lattice;
pub mod output;
pub mod patch;
pub mod scalar;
pub mod selftest;
pub mod theory;

pub use error::{Error, Result};
