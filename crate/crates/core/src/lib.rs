//! Mild solutions of the fractionally dissipated Navier-Stokes system on a periodic
//! box, together with wavelet-coefficient Besov, Besov-Q and tent-space norms.

pub mod cli_harness;
pub mod error;
pub mod fft;
pub mod field;
pub mod function_spaces;
pub mod index_inequalities;
pub mod meyer_wavelet;
pub mod mild_solver;
pub mod operators;
pub mod semigroup;

pub use error::{Error, Result};
pub use field::{Grid, SpectralField, C64};
