//! Sparse Fourier calculus on flat tori `T^n = R^n/Z^n`.

mod field;
mod freq;
mod hodge;
pub mod ops;
mod serialize;
mod tables;

pub use field::{FourierField, Layout, TorusCtx, DEFAULT_CAP};
pub use freq::Freq;
pub use hodge::{cohomology_dims, cohomology_formula, torus_for, CohomologyDim, HodgePackage};
pub use ops::{
    codifferential, convolve, d, endo_product, g_operator, hodge_green_derham, insert_tensor, interior_field,
    jacobian, laplacian, lie_a, lie_of_vector, nijenhuis, rho_hat_field, wedge_fields,
};
pub use serialize::{read_field, write_field};
