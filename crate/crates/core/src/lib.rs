//! Numerical laboratory for Rhaly operators on Hardy and Bergman spaces.
//!
//! Functions are handled as truncated Taylor series ([`CoeffSeq`]). On top of
//! that sit integral means and space norms ([`norms`]), dyadic block profiles
//! for mean Lipschitz classes ([`lipschitz`]), the operator itself
//! ([`rhaly`]), the extremal test families ([`constructions`]) and the verdict
//! engine ([`classifier`]).

pub mod classifier;
pub mod coeff;
pub mod constructions;
pub mod error;
pub mod lipschitz;
pub mod norms;
pub mod par;
pub mod quadrature;
pub mod rhaly;
pub mod suite;

#[doc(hidden)]
pub mod oracle;

pub use coeff::{CircleGrid, CoeffSeq};
pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Version string embedded in every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
