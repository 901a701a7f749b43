//! Construction and numerical verification of invariant surfaces with
//! multiple isolated equilibria inside linear flows, together with the
//! symmetric-power lifting machinery that turns them into graphs.

pub mod config;
pub mod error;
pub mod figures;
pub mod linflow;
pub mod mesh;
pub mod polynomials;
pub mod surface;
pub mod symspace;
pub mod verify;

pub use error::{Error, Result};
