//! Dense smooth subalgebras of convolution algebras on discrete groups.
//!
//! The crate builds weighted ℓ¹ crossed products over finitely generated
//! groups and measures the inequalities that make them spectrally invariant:
//! chain bounds on seminorms, equality of spectral radii, Neumann inversion
//! and decay.

pub mod coeff;
pub mod crossed;
pub mod error;
pub mod groups;
pub mod rng;
pub mod smoothk;
pub mod spectra;
pub mod tower;
pub mod verify;

pub use error::{Error, Result};
