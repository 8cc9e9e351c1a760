//! Gaussian Bernstein processes driven by the harmonic oscillator.
//!
//! The crate evaluates the N-dimensional Mehler kernel and its Hermite
//! expansion, builds exact finite-dimensional laws for Ornstein-Uhlenbeck
//! type processes (stationary, pinned, reversed, bridge and the periodic
//! mixture family), samples paths, and checks every closed-form identity
//! against independent numerical computations.

pub mod error;
pub mod gaussian_linalg;
pub mod hyperbolic;
pub mod mehler_kernel;
pub mod mixtures;
pub mod params;
pub mod processes;
pub mod quadrature;
pub mod samplers;
pub mod special_functions;
pub mod verify;

pub use error::{Error, Result};
pub use params::{HarmonicParams, TimeGrid};
