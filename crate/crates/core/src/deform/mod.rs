//! Order-by-order construction of a gauge power series
//! `a(t) = Σ_k a_k t^k / k!` with `ρ_{exp a(t)} Φ⁰` closed, on a flat torus.
//!
//! Order `k` of `d ρ_{exp a(t)} Φ⁰` is `(1/k!) d ρ̂_{a_k}Φ⁰ + Ob_k(a_{<k})`.
//! The obstruction `Ob_k` is read off directly from the Taylor expansion of
//! the exponential; `a_k` is then chosen as `(1/k!) ρ̂_{a_k}Φ⁰ = −d*G_#(Ob_k)`.

mod engine;
mod majorant;
mod problem;
mod taylor;

pub use engine::{derivative_check, Engine, Evaluation, ScalingCheck};
pub use majorant::{majorant_diagnostic, MajorantReport};
pub use problem::{
    degenerate_fixture, single_mode_a1, DeformationProblem, DeformationRun, DeformationTrace, ObstructionClass,
    OrderRecord, Tolerances, DEFAULT_T_GRID,
};
pub use taylor::TaylorTable;
