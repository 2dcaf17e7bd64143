use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::problem::{DeformationProblem, DeformationRun, DeformationTrace, ObstructionClass, OrderRecord, Tolerances};
use super::taylor::TaylorTable;
use crate::exterior::binomial;
use crate::linalg::pseudo_inverse;
use crate::model::{rho_generator_matrix, CalibrationModel};
use crate::torus::{
    d, endo_product, insert_tensor, lie_a, nijenhuis, rho_hat_field, FourierField, HodgePackage, Layout, TorusCtx,
};
use crate::{Error, Result};

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn with_order<T>(r: Result<T>, k: usize) -> Result<T> {
    r.map_err(|e| match e {
        Error::SupportCap { cap, freq, context } => {
            Error::SupportCap { cap, freq, context: format!("{context} at order {k}") }
        }
        other => other,
    })
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Everything about a model that stays fixed during a run.
#[derive(Debug)]
pub struct Engine {
    pub pkg: HodgePackage,
    pub ctx: TorusCtx,
    pub sobolev_s: f64,
    pub tol: Tolerances,
    phi: FourierField,
    /// Minimum-norm inverse of `ξ ↦ ρ̂_ξΦ⁰`; its image is orthogonal to the
    /// isotropy algebra.
    rho_pinv: DMatrix<f64>,
    /// `1/σ_min` of `ξ ↦ ρ̂_ξΦ⁰` on the isotropy complement.
    pub recovery_constant: f64,
}

/// `Φ_t` and its closedness defect.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub t: f64,
    pub phi_t: FourierField,
    /// `‖dΦ_t‖_{s−1}`.
    pub residual: f64,
    /// `‖dΦ_t‖_{L²}`.
    pub residual_l2: f64,
    /// Number of exponential-series terms summed.
    pub exp_terms: usize,
    /// Max-norm of the last term kept.
    pub tail: f64,
}

/// Residuals at `t` and `t/2` against the expected `2^{N+1}` drop.
#[derive(Clone, Debug)]
pub struct ScalingCheck {
    pub t: f64,
    pub residual: f64,
    pub residual_half: f64,
    pub ratio: f64,
    pub expected: f64,
}

impl ScalingCheck {
    /// Ratio within a factor of 2 of `2^{N+1}`.
    pub fn pass(&self) -> bool {
        self.ratio >= self.expected / 2.0 && self.ratio <= self.expected * 2.0
    }
}

impl Engine {
    pub fn new(model: &CalibrationModel, ctx: TorusCtx, sobolev_s: f64, tol: Tolerances) -> Result<Self> {
        if ctx.n != model.dim() {
            return Err(Error::DimMismatch(ctx.n, model.dim()));
        }
        let pkg = HodgePackage::new(model)?;
        let phi = FourierField::from_tuple(ctx, model.real_phi0())?;
        let (rho_pinv, smin) = pseudo_inverse(&rho_generator_matrix(model), 1e-6);
        Ok(Engine {
            pkg,
            ctx,
            sobolev_s,
            tol,
            phi,
            rho_pinv,
            recovery_constant: if smin > 0.0 { 1.0 / smin } else { f64::INFINITY },
        })
    }

    pub fn for_problem(p: &DeformationProblem) -> Result<Self> {
        Engine::new(&p.model, p.ctx, p.sobolev_s, p.tol)
    }

    pub fn phi(&self) -> &FourierField {
        &self.phi
    }

    pub fn table(&self) -> TaylorTable {
        TaylorTable::new(self.phi.clone())
    }

    /// Table holding given coefficients `a_1, a_2, …`.
    pub fn table_from(&self, coefficients: &[FourierField]) -> TaylorTable {
        let mut t = self.table();
        for a in coefficients {
            t.push(a);
        }
        t
    }

    pub fn rho_phi(&self, a: &FourierField) -> Result<FourierField> {
        rho_hat_field(a, &self.phi)
    }

    /// `dR_k`, the order-`k` coefficient of `d ρ_{exp a(t)}Φ⁰` from the
    /// coefficients currently in the table.
    pub fn taylor_residual(&self, table: &mut TaylorTable, k: usize) -> Result<FourierField> {
        with_order(table.coefficient_of_exp(k, 1).and_then(|f| d(&f)), k)
    }

    /// `Ob_k`: `dR_k` without the `a_k` term, with its harmonic class.
    pub fn obstruction(&self, table: &mut TaylorTable, k: usize) -> Result<(FourierField, ObstructionClass)> {
        let ob = with_order(table.coefficient_of_exp(k, 2).and_then(|f| d(&f)), k)?;
        let membership = self.pkg.subspace_residual(2, &ob)?;
        let harm = self.pkg.harmonic_part(2, &ob)?;
        let norm = harm.l2_norm();
        let class = ObstructionClass {
            order: k,
            norm,
            relative_residue: ratio(norm, ob.l2_norm()),
            membership_residual: membership,
            representative: harm,
        };
        Ok((ob, class))
    }

    /// The endomorphism field with `ρ̂_aΦ⁰ = rho`, orthogonal to the isotropy
    /// algebra at every mode.
    pub fn recover(&self, rho: &FourierField) -> FourierField {
        let n = self.ctx.n;
        rho.map_modes_to(Layout::Endo(n), |_, c| {
            let re = &self.rho_pinv * DVector::from_iterator(c.len(), c.iter().map(|z| z.re));
            let im = &self.rho_pinv * DVector::from_iterator(c.len(), c.iter().map(|z| z.im));
            re.iter().zip(im.iter()).map(|(a, b)| Complex64::new(*a, *b)).collect()
        })
    }

    /// `a_k` from `(1/k!) ρ̂_{a_k}Φ⁰ = −d₁^* G_#(Ob_k)`.
    pub fn solve_order(&self, ob: &FourierField, class: &ObstructionClass) -> Result<FourierField> {
        if class.relative_residue >= self.tol.harmonic_tol {
            return Err(Error::Obstructed(Box::new(class.clone())));
        }
        let k = class.order;
        let x = self.pkg.d_sharp_adjoint(2, &self.pkg.green_sharp(2, ob)?)?;
        Ok(self.recover(&x.scale_re(-factorial(k))))
    }

    fn check_first_order(&self, p: &DeformationProblem) -> Result<()> {
        let rho = self.rho_phi(&p.a1)?;
        let scale = rho.max_abs().max(f64::MIN_POSITIVE);
        let closure = d(&rho)?.max_abs() / scale;
        if closure > p.tol.closure_tol {
            return Err(Error::Precondition(format!("d rho_hat(a1) Phi0 = {closure:e} relative, not closed")));
        }
        if p.gauge_fix {
            let co = self.pkg.d_sharp_adjoint(1, &rho)?.max_abs() / scale;
            if co > p.tol.closure_tol {
                return Err(Error::Precondition(format!("d0* rho_hat(a1) Phi0 = {co:e} relative, not gauge fixed")));
            }
        }
        Ok(())
    }

    /// Iterates orders `2..=N`; stops with [`Error::Obstructed`] at the first
    /// order whose obstruction has a harmonic part.
    pub fn run(&self, p: &DeformationProblem) -> Result<DeformationRun> {
        p.check_layout()?;
        self.check_first_order(p)?;
        let s = self.sobolev_s;
        let mut table = self.table();
        table.push(&p.a1);
        let mut records = vec![OrderRecord {
            order: 1,
            a_norm: p.a1.sobolev_norm(s),
            ob_norm: 0.0,
            harmonic_residue: 0.0,
            derham_harmonic: 0.0,
            closure: d(&self.rho_phi(&p.a1)?)?.l2_norm(),
            coexact_residual: ratio(
                self.pkg.d_sharp_adjoint(1, &self.rho_phi(&p.a1)?)?.l2_norm(),
                self.rho_phi(&p.a1)?.l2_norm(),
            ),
            support_radius: p.a1.support_radius(),
        }];
        let mut coefficients = vec![p.a1.clone()];
        for k in 2..=p.orders {
            let (ob, class) = self.obstruction(&mut table, k)?;
            let a_k = self.solve_order(&ob, &class)?;
            table.push(&a_k);
            let ob_norm = ob.l2_norm();
            let closure = ratio(self.taylor_residual(&mut table, k)?.l2_norm(), ob_norm);
            let rho = self.rho_phi(&a_k)?;
            let coexact = ratio(self.pkg.d_sharp_adjoint(1, &rho)?.l2_norm(), rho.l2_norm());
            let derham = ob.mode(&crate::torus::Freq::zero(self.ctx.n)).map_or(0.0, |c| {
                c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
            });
            records.push(OrderRecord {
                order: k,
                a_norm: a_k.sobolev_norm(s) / factorial(k),
                ob_norm: ob.sobolev_norm(s - 1.0),
                harmonic_residue: class.relative_residue,
                derham_harmonic: ratio(derham, ob_norm),
                closure,
                coexact_residual: coexact,
                support_radius: a_k.support_radius(),
            });
            coefficients.push(a_k);
        }
        let x: Vec<f64> = records.iter().map(|r| r.a_norm).collect();
        let radius_estimate = match (x.len() >= 2, x.last()) {
            (true, Some(&last)) if last > 0.0 => Some(x[x.len() - 2] / last),
            _ => None,
        };
        Ok(DeformationRun {
            trace: DeformationTrace {
                model: p.model.kind().to_string(),
                sobolev_s: s,
                records,
                radius_estimate,
            },
            coefficients,
        })
    }

    /// `Φ_t = exp(ρ̂_{a(t)})Φ⁰` with `a(t) = Σ_k a_k t^k/k!` truncated at the
    /// computed order. The exponential series is summed until its terms drop
    /// below `1e−18 ‖Φ⁰‖`, or until the next term would leave the support cap.
    pub fn evaluate(&self, coefficients: &[FourierField], t: f64) -> Result<Evaluation> {
        let mut a_t = FourierField::zero(self.ctx, Layout::Endo(self.ctx.n));
        for (i, a) in coefficients.iter().enumerate() {
            let k = i + 1;
            a_t = a_t.add(&a.scale_re(t.powi(k as i32) / factorial(k)))?;
        }
        let scale = self.phi.max_abs();
        let mut sum = self.phi.clone();
        let mut term = self.phi.clone();
        let mut m = 0;
        let r = a_t.support_radius();
        while m < 200 && !a_t.is_zero() {
            if (m as i32 + 1) * r > self.ctx.cap {
                break;
            }
            m += 1;
            term = rho_hat_field(&a_t, &term)?.scale_re(1.0 / m as f64);
            sum = sum.add(&term)?;
            if term.max_abs() < 1e-18 * scale {
                break;
            }
        }
        let dphi = d(&sum)?;
        Ok(Evaluation {
            t,
            residual: dphi.sobolev_norm(self.sobolev_s - 1.0),
            residual_l2: dphi.l2_norm(),
            phi_t: sum,
            exp_terms: m,
            tail: term.max_abs(),
        })
    }

    /// Residual at `t` and `t/2`.
    pub fn scaling_check(&self, coefficients: &[FourierField], t: f64) -> Result<ScalingCheck> {
        let r1 = self.evaluate(coefficients, t)?.residual;
        let r2 = self.evaluate(coefficients, t / 2.0)?.residual;
        Ok(ScalingCheck {
            t,
            residual: r1,
            residual_half: r2,
            ratio: r1 / r2,
            expected: 2f64.powi(coefficients.len() as i32 + 1),
        })
    }

    /// The closed form `Σ_{l=2}^k (−1)^{l−1}/l! (Ad^{l−2}_{ρ̂_a} G(a,a))_k Φ⁰`
    /// built from `a_1, …, a_{k−1}` only.
    pub fn closed_form_obstruction(&self, table: &TaylorTable, k: usize) -> Result<FourierField> {
        let alphas: Vec<FourierField> = (1..k.min(table.order() + 1)).map(|i| table.alpha(i).clone()).collect();
        let zero = FourierField::zero(self.ctx, self.phi.layout.clone());
        let out_layout = Layout::Forms(self.phi.layout.tuple()?.shifted(1));
        let zero_out = FourierField::zero(self.ctx, out_layout);
        let graded_phi: Vec<FourierField> =
            (0..=k).map(|g| if g == 0 { self.phi.clone() } else { zero.clone() }).collect();
        let rho = |s: &[FourierField]| -> Result<Vec<FourierField>> {
            let mut out = vec![FourierField::zero(self.ctx, s[0].layout.clone()); k + 1];
            for (deg, slot) in out.iter_mut().enumerate() {
                for (i, alpha) in alphas.iter().enumerate() {
                    let i = i + 1;
                    if i > deg || s[deg - i].is_zero() {
                        continue;
                    }
                    *slot = slot.add(&rho_hat_field(alpha, &s[deg - i])?)?;
                }
            }
            Ok(out)
        };
        // G(a,a) = Σ_{i,j} i_{N(α_i,α_j)} − L_{α_i α_j} raises the degree by i + j.
        let g_op = |s: &[FourierField]| -> Result<Vec<FourierField>> {
            let mut out = vec![zero_out.clone(); k + 1];
            for (deg, slot) in out.iter_mut().enumerate() {
                for (i, ai) in alphas.iter().enumerate() {
                    for (j, aj) in alphas.iter().enumerate() {
                        let w = i + j + 2;
                        if w > deg || s[deg - w].is_zero() {
                            continue;
                        }
                        let f = &s[deg - w];
                        let term = insert_tensor(&nijenhuis(ai, aj)?, f)?.sub(&lie_a(&endo_product(ai, aj)?, f)?)?;
                        *slot = slot.add(&term)?;
                    }
                }
            }
            Ok(out)
        };
        let mut total = zero_out.clone();
        for l in 2..=k {
            let j = l - 2;
            let mut ad = zero_out.clone();
            for r in 0..=j {
                let mut s = graded_phi.clone();
                for _ in 0..j - r {
                    s = rho(&s)?;
                }
                s = g_op(&s)?;
                for _ in 0..r {
                    s = rho(&s)?;
                }
                let sign = if (j - r) % 2 == 0 { 1.0 } else { -1.0 };
                ad = ad.add(&s[k].scale_re(sign * binomial(j, r) as f64))?;
            }
            let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
            total = total.add(&ad.scale_re(sign / factorial(l)))?;
        }
        Ok(total)
    }
}

/// Relative max-norm distance between the central difference
/// `(Φ_h − Φ_{−h}) / 2h` and `ρ̂_{a₁}Φ⁰`.
pub fn derivative_check(engine: &Engine, coefficients: &[FourierField], h: f64) -> Result<f64> {
    let plus = engine.evaluate(coefficients, h)?.phi_t;
    let minus = engine.evaluate(coefficients, -h)?.phi_t;
    let slope = plus.sub(&minus)?.scale_re(0.5 / h);
    let target = engine.rho_phi(&coefficients[0])?;
    Ok(slope.sub(&target)?.max_abs() / target.max_abs().max(f64::MIN_POSITIVE))
}
