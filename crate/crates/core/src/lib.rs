//! Finite-section models of torus-equivariant spectral triples and checks of
//! the conditions under which they factorise as Kasparov products over the
//! orbit space.
//!
//! The crate is `no_std` with `alloc`; file formats and the command line live
//! in the companion `equifact` crate.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod factor_check;
pub mod graded_core;
pub mod models;
pub mod sectors;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
