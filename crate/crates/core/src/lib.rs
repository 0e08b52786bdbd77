//! Numerical workbench for decoherence-free operator algebras of small
//! qubit arrays.

pub mod commutant;
pub mod error;
pub mod gns;
pub mod linalg;
pub mod pauli;
pub mod sim;
pub mod spin;

pub use error::{Error, Result};
