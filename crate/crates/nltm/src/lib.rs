//! Transfer matrices and scattering amplitudes for energy-dependent
//! nonlocal potentials in two dimensions.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod potential;
pub mod scatter;

pub use error::{Error, Result};
