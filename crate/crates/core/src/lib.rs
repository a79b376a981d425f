//! Coherent-state quantum process tomography on a truncated Fock space.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod processes;
pub mod tomography;

pub use error::{Error, Result};
