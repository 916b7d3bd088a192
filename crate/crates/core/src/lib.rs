//! Bound states of the Klein-Gordon equation with a position-dependent mass in
//! a q-deformed Pöschl-Teller well, solved in closed form by the parametric
//! Nikiforov-Uvarov method and checked against independent numerical oracles.
//!
//! Units are natural, `hbar = c = 1`.

pub mod cli;
pub mod error;
pub mod jacobi;
mod linalg;
pub mod nu_engine;
pub mod qdeform;
pub mod spectrum;
pub mod verify;
pub mod wavefunction;

pub use error::{Error, Result};
