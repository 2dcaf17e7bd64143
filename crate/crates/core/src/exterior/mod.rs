//! Exterior algebra over a real vector space `V = R^n` with complex
//! coefficients.
//!
//! Covectors `e^1, ..., e^n` are dual to the standard basis `e_1, ..., e_n`.
//! Axis labels are 0-based in code and 1-based in every printed format.

mod basis;
mod endo;
mod form;
mod index;
mod metric;
mod ops;
mod tuple;

pub use basis::{binomial, FormBasis};
pub use endo::Endo;
pub use form::{Form, DEFAULT_PRUNE_EPS};
pub use index::MultiIndex;
pub use metric::{hodge_star, Metric, Orientation};
pub use ops::{
    exp_action, interior, interior_basis, interior_complex, pullback, pullback_complex,
    rho_hat, wedge,
};
pub use tuple::{FormTuple, TupleLayout};
