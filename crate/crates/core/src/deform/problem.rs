use std::fmt::Write as _;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::Endo;
use crate::model::{build_model, isotropy_algebra, unit_vector, CalibrationModel, ModelKind};
use crate::torus::{jacobian, FourierField, Freq, Layout, TorusCtx};
use crate::{Error, Result};

pub const DEFAULT_T_GRID: [f64; 4] = [0.01, 0.02, 0.05, 0.1];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Bound on `‖dρ̂_{a₁}Φ⁰‖` relative to `‖ρ̂_{a₁}Φ⁰‖`.
    pub closure_tol: f64,
    /// Bound on the `#`-harmonic part of `Ob_k` relative to `‖Ob_k‖`.
    pub harmonic_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { closure_tol: 1e-10, harmonic_tol: 1e-9 }
    }
}

#[derive(Clone, Debug)]
pub struct DeformationProblem {
    pub model: CalibrationModel,
    pub ctx: TorusCtx,
    /// Endomorphism-valued first-order term.
    pub a1: FourierField,
    pub orders: usize,
    pub t_eval: Vec<f64>,
    pub tol: Tolerances,
    /// Require `d₀^* ρ̂_{a₁}Φ⁰ = 0` as well as closedness.
    pub gauge_fix: bool,
    pub sobolev_s: f64,
}

impl DeformationProblem {
    pub fn new(model: CalibrationModel, a1: FourierField) -> Self {
        DeformationProblem {
            ctx: a1.ctx,
            model,
            a1,
            orders: 8,
            t_eval: DEFAULT_T_GRID.to_vec(),
            tol: Tolerances::default(),
            gauge_fix: false,
            sobolev_s: 6.0,
        }
    }
}

/// The harmonic blockage met at some order.
#[derive(Clone, Debug)]
pub struct ObstructionClass {
    pub order: usize,
    /// `#`-harmonic part of `Ob_k`: its `E²` mode-0 coefficient, together with
    /// any kernel of the `#` Laplacian at nonzero modes when the model is not
    /// elliptic.
    pub representative: FourierField,
    pub norm: f64,
    /// `norm / ‖Ob_k‖`.
    pub relative_residue: f64,
    /// Distance of `Ob_k` from `Γ(E²)`, relative to its size.
    pub membership_residual: f64,
}

/// Per-order numbers of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderRecord {
    pub order: usize,
    /// `‖a_k‖_s / k!`.
    pub a_norm: f64,
    /// `‖Ob_k‖_{s−1}`.
    pub ob_norm: f64,
    /// Relative `#`-harmonic part of `Ob_k`.
    pub harmonic_residue: f64,
    /// De Rham harmonic (mode-0) part of `Ob_k`; zero for a d-exact form.
    pub derham_harmonic: f64,
    /// `‖dR_k‖` after `a_k` is inserted, relative to `‖Ob_k‖`.
    pub closure: f64,
    /// `‖d₀^* ρ̂_{a_k}Φ⁰‖` relative to `‖ρ̂_{a_k}Φ⁰‖`.
    pub coexact_residual: f64,
    pub support_radius: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeformationTrace {
    pub model: String,
    pub sobolev_s: f64,
    pub records: Vec<OrderRecord>,
    /// Ratio-test estimate `x_{N−1}/x_N` of the radius of convergence from
    /// `x_k = ‖a_k‖_s/k!`; `None` when the tail vanishes.
    pub radius_estimate: Option<f64>,
}

impl DeformationTrace {
    /// `x_k = ‖a_k‖_s / k!` for `k = 1..=N`.
    pub fn a_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.a_norm).collect()
    }

    /// Machine-readable lines, one per order.
    pub fn machine_lines(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            let _ = writeln!(
                s,
                "order={} a_norm={:e} ob_norm={:e} harmonic={:e} derham={:e} closure={:e} coexact={:e} radius={}",
                r.order,
                r.a_norm,
                r.ob_norm,
                r.harmonic_residue,
                r.derham_harmonic,
                r.closure,
                r.coexact_residual,
                r.support_radius
            );
        }
        s
    }

    pub fn human_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model {}  (Sobolev s = {})", self.model, self.sobolev_s);
        let _ = writeln!(
            s,
            "{:>5}  {:>12}  {:>12}  {:>10}  {:>10}  {:>10}  {:>6}",
            "k", "|a_k|_s/k!", "|Ob_k|", "harmonic", "closure", "coexact", "supp"
        );
        for r in &self.records {
            let _ = writeln!(
                s,
                "{:>5}  {:>12.4e}  {:>12.4e}  {:>10.2e}  {:>10.2e}  {:>10.2e}  {:>6}",
                r.order, r.a_norm, r.ob_norm, r.harmonic_residue, r.closure, r.coexact_residual, r.support_radius
            );
        }
        match self.radius_estimate {
            Some(r) => {
                let _ = writeln!(s, "ratio-test radius estimate: {r:.4e}");
            }
            None => {
                let _ = writeln!(s, "ratio-test radius estimate: unbounded (series terminates)");
            }
        }
        s
    }
}

/// Result of a completed run: the trace and `a_1, …, a_N`.
#[derive(Clone, Debug)]
pub struct DeformationRun {
    pub trace: DeformationTrace,
    pub coefficients: Vec<FourierField>,
}

fn endo_field(ctx: TorusCtx, k: Freq, m: &Endo) -> Result<FourierField> {
    let c: Vec<Complex64> = m.matrix().transpose().iter().map(|x| Complex64::new(*x, 0.0)).collect();
    FourierField::single(ctx, Layout::Endo(ctx.n), k, c)
}

/// A first-order term with a single low mode: `a₁ = h + DX` where `h` is a
/// constant unit endomorphism orthogonal to the isotropy algebra (so `ρ̂_hΦ⁰`
/// spans a harmonic direction) scaled by `amplitude`, and
/// `X = (amplitude_x / 2π) cos(2π x¹) v` for a random unit vector `v`. Then
/// `ρ̂_{a₁}Φ⁰ = ρ̂_hΦ⁰ + d i_XΦ⁰` is closed and `a₁` has modes `0, ±e₁` only.
pub fn single_mode_a1(model: &CalibrationModel, amplitude: f64, amplitude_x: f64, seed: u64) -> Result<FourierField> {
    let n = model.dim();
    let ctx = TorusCtx::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let iso = isotropy_algebra(model)?;
    let raw = DVector::from_fn(n * n, |_, _| rng.random_range(-1.0..1.0));
    let perp = &raw - iso.project(&raw);
    let h = perp.clone() / perp.norm();
    let h = Endo::from_row_slice(n, h.as_slice())?.scale(amplitude);
    let mut a1 = endo_field(ctx, Freq::zero(n), &h)?;
    let v = unit_vector(&mut rng, n);
    let c = amplitude_x / std::f64::consts::TAU / 2.0;
    let mut x = FourierField::zero(ctx, Layout::Vector(n));
    let vc: Vec<Complex64> = v.iter().map(|x| Complex64::new(x * c, 0.0)).collect();
    x.add_mode(&Freq::axis(n, 0, 1), &vc, "a1")?;
    x.add_mode(&Freq::axis(n, 0, -1), &vc, "a1")?;
    a1 = a1.add(&jacobian(&x)?)?;
    Ok(a1)
}

/// The obstructed fixture on the degenerate 2-form `e^{12}` on `T⁴`:
/// `a₁ = E_{13} + cos(2πx¹) E_{24}` keeps `ρ̂_{a₁}Φ⁰` closed, but the quadratic
/// term has a component `d(cos(2πx¹)) ∧ e^{34}` at modes `±e₁`, where wedging
/// with `e¹` fails to be exact on the E-spaces.
pub fn degenerate_fixture() -> Result<(CalibrationModel, FourierField)> {
    let model = build_model(ModelKind::DegenerateSymplectic)?;
    let ctx = TorusCtx::new(4);
    let a1 = endo_field(ctx, Freq::zero(4), &Endo::unit(4, 0, 2))?;
    let half = Endo::unit(4, 1, 3).scale(0.5);
    let a1 = a1
        .add(&endo_field(ctx, Freq::axis(4, 0, 1), &half)?)?
        .add(&endo_field(ctx, Freq::axis(4, 0, -1), &half)?)?;
    Ok((model, a1))
}

impl DeformationProblem {
    pub(crate) fn check_layout(&self) -> Result<()> {
        if self.a1.layout != Layout::Endo(self.model.dim()) || self.ctx.n != self.model.dim() {
            return Err(Error::Layout(format!(
                "a1 must be an endomorphism field on T^{}, got {:?}",
                self.model.dim(),
                self.a1.layout
            )));
        }
        if self.orders == 0 {
            return Err(Error::Precondition("orders must be at least 1".into()));
        }
        if !self.a1.is_real(1e-12) {
            return Err(Error::Precondition("a1 is not a real field".into()));
        }
        Ok(())
    }
}
