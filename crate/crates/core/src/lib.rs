//! Lattice-regularized real-time path integrals in one dimension, evaluated
//! by the stitching method: per-slice oscillatory integrals J_n on rotated
//! contours (or by the eikonal approximation), composed with FFT
//! convolutions of their decaying residuals.
//!
//! The crate also carries the ground truths used to validate the method: the
//! exact Rosen-Morse propagator, brute-force nested quadrature for small N,
//! a Crank-Nicolson evolver and classical shooting for caustics.

pub mod error;
pub mod jn;
pub mod lattice;
pub mod oracles;
pub mod potentials;
pub mod special;
pub mod stitcher;

pub use error::{Error, Result};
pub use lattice::{
    fourier_wavenumbers, gaussian_kernel_fourier, normalization_c, GridFunction, PhysicalParams, PropagatorStack,
    SpatialLattice,
};
pub use potentials::PotentialSpec;
