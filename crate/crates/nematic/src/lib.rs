pub mod checkpoint;
pub mod coefficients;
pub mod config;
pub mod constitutive;
pub mod diagnostics;
pub mod error;
pub mod solver;
pub mod verify;
mod fft;
pub mod field;
pub mod galerkin;
pub mod grid;
pub mod presets;
mod pad;

pub use error::{NematicError, Result};
