//! Time-dependent Ising chain
//!
//! ```text
//! H(t) = sum_l W_l Z_l Z_{l+1} - sum_l (Jx_l X_l + Jz_l Z_l)
//! ```
//!
//! simulated two ways: as free Majorana fermions when `Jz = 0`
//! ([`fermion`], [`dynamics`]) and by brute force on the full Hilbert space
//! ([`exact`]). [`protocols`] builds the quench, beam-splitter and gate
//! schedules on top of the shared [`model`].

pub mod dynamics;
pub mod error;
pub mod exact;
pub mod fermion;
pub mod linalg;
pub mod model;
pub mod protocols;
mod stepping;

pub use error::{Error, Result};
pub use stepping::MAX_STEPS;
