//! Sparse Fock-space simulation of heralded linear-optical entanglement
//! schemes: EPR-pair fusion into spin-j states, telecloning-state
//! preparation and the 1→2 cloning check, with a permanent-based dense
//! oracle for cross-validation.

pub mod analysis;
pub mod circuit;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod linops;
pub mod measure;
pub mod oracle;
pub mod targets;

pub use error::{Error, Result};
pub use num_complex::Complex64;
