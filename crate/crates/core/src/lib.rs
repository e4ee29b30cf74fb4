//! Spectra of the open non-hermitian Kitaev chain.
//!
//! The crate covers finite-chain Bogoliubov–de Gennes diagonalisation, the
//! infinite-size eigenvalue curves obtained from the Vieta system of the bulk
//! quartic, the zero-mode criterion, and per-eigenvalue skin-effect
//! classification through Bistritz unit-circle root counting.
//!
//! ```
//! use nhkitaev::{model::ModelParams, zeromode};
//! use num_complex::Complex64;
//!
//! let p = ModelParams::real(0.0, 1.0, 1.0, 0.5, 0.5);
//! let verdict = zeromode::has_zero_mode(&p).unwrap();
//! assert!(verdict.exists);
//! # let _ = Complex64::new(0.0, 0.0);
//! ```

pub mod error;
pub mod finite;
pub mod infinite;
pub mod model;
pub mod par;
pub mod polycore;
pub mod skin;
pub mod zeromode;

pub use error::{Error, Result};
pub use model::ModelParams;

/// Complex scalar used throughout the crate.
pub type Complex = num_complex::Complex64;
