//! Deformation theory of calibrations on flat tori.
//!
//! The crate is layered bottom-up:
//!
//! - [`exterior`]: pointwise exterior algebra with complex coefficients.
//! - [`linalg`]: numerical rank, orthonormal bases and subspaces.
//! - [`model`]: the flat model calibrations, their E-spaces, isotropy
//!   algebras, irreducible splittings and ellipticity certificates.
//! - [`torus`]: exact sparse Fourier calculus on flat tori, including the
//!   Green operator of the deformation complex.
//! - [`deform`]: the order-by-order power-series deformation engine.
//! - [`identities`]: randomized checks of the operator identities the
//!   engine relies on.

pub mod deform;
pub mod error;
pub mod exterior;
pub mod identities;
pub mod linalg;
pub mod model;
pub mod torus;

pub use error::{Error, Result};
pub use num_complex::Complex64;
