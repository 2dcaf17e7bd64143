//! Randomized checks of the operator identities behind the deformation
//! calculus, each evaluated on random sparse Fourier data:
//!
//! * `anti-derivation`: `L_a(f∧g) = L_a f ∧ g + (−1)^{|f|} f ∧ L_a g`;
//! * `evaluation-formula`: `(L_a η)(e_{i_0},…,e_{i_p}) = Σ_r (−1)^r (L_{a e_{i_r}} η)(…)`
//!   with the Cartan Lie derivative on the right;
//! * `commutator`: `[L_a, ρ̂_b] = i_{N(a,b)} − L_{ab}`;
//! * `quadratic-term`: `d ρ̂_a ρ̂_a Φ = −G(a,a)Φ ∈ Γ(E²)` when `Φ` and `ρ̂_aΦ` are closed;
//! * `ad-powers`: `Ad^k_{ρ̂_a} G(a,a) Φ⁰ ∈ Γ(E²)` for `k ≤ 3`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::{binomial, FormBasis};
use crate::model::{build_model, isotropy_algebra, CalibrationModel, ModelKind};
use crate::torus::{
    d, endo_product, g_operator, insert_tensor, interior_field, jacobian, lie_a, nijenhuis, rho_hat_field,
    wedge_fields, FourierField, Freq, HodgePackage, Layout, TorusCtx,
};
use crate::Result;

pub const IDENTITY_TOL: f64 = 1e-10;
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Worst case of one identity over a batch of random instances.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub name: &'static str,
    pub trials: usize,
    /// `max |lhs − rhs| / max(1, |lhs|, |rhs|)` over all trials.
    pub max_residual: f64,
    /// Largest E²-projection residual, for the membership identities.
    pub max_membership: Option<f64>,
    /// Sup norms of the two sides in the worst trial.
    pub lhs_norm: f64,
    pub rhs_norm: f64,
}

impl IdentityReport {
    pub fn pass(&self) -> bool {
        self.max_residual < IDENTITY_TOL && self.max_membership.is_none_or(|m| m < MEMBERSHIP_TOL)
    }
}

struct Sample {
    residual: f64,
    membership: Option<f64>,
    lhs: f64,
    rhs: f64,
}

fn compare(lhs: &FourierField, rhs: &FourierField) -> Result<Sample> {
    let (l, r) = (lhs.max_abs(), rhs.max_abs());
    let diff = lhs.sub(rhs)?.max_abs();
    Ok(Sample { residual: diff / 1f64.max(l).max(r), membership: None, lhs: l, rhs: r })
}

/// A real field (`c_{−k} = conj c_k`) with `modes` random frequencies in `[−r, r]^n`.
pub fn random_real_field(rng: &mut ChaCha8Rng, ctx: TorusCtx, layout: Layout, modes: usize, r: i32) -> FourierField {
    let mut f = FourierField::zero(ctx, layout.clone());
    for _ in 0..modes {
        let k = Freq((0..ctx.n).map(|_| rng.random_range(-r..=r)).collect());
        let c: Vec<Complex64> = (0..layout.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let conj: Vec<Complex64> = c.iter().map(Complex64::conj).collect();
        f.add_mode(&k, &c, "random field").expect("within cap");
        f.add_mode(&-&k, &conj, "random field").expect("within cap");
    }
    f
}

fn random_degree(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.random_range(0..=n.min(4))
}

fn anti_derivation(rng: &mut ChaCha8Rng) -> Result<Sample> {
    let n = rng.random_range(3..=5);
    let ctx = TorusCtx::new(n);
    let (p, q) = (random_degree(rng, n - 1), random_degree(rng, n - 1));
    let a = random_real_field(rng, ctx, Layout::Endo(n), 2, 2);
    let f = random_real_field(rng, ctx, Layout::forms(n, vec![p]), 2, 2);
    let g = random_real_field(rng, ctx, Layout::forms(n, vec![q]), 2, 2);
    let lhs = lie_a(&a, &wedge_fields(&f, &g)?)?;
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = wedge_fields(&lie_a(&a, &f)?, &g)?.add(&wedge_fields(&f, &lie_a(&a, &g)?)?.scale_re(sign))?;
    compare(&lhs, &rhs)
}

/// Cartan Lie derivative `L_X η = d i_X η + i_X d η`.
fn cartan(x: &FourierField, eta: &FourierField) -> Result<FourierField> {
    let second = interior_field(x, &d(eta)?)?;
    if eta.layout.tuple()?.degrees == [0] {
        return Ok(second);
    }
    d(&interior_field(x, eta)?)?.add(&second)
}

fn evaluation_formula(rng: &mut ChaCha8Rng) -> Result<Sample> {
    let n = rng.random_range(3..=5);
    let ctx = TorusCtx::new(n);
    let p = rng.random_range(0..n);
    let a = random_real_field(rng, ctx, Layout::Endo(n), 2, 2);
    let eta = random_real_field(rng, ctx, Layout::forms(n, vec![p]), 2, 2);
    let lhs = lie_a(&a, &eta)?;
    // The vector fields x ↦ a(x) e_i.
    let columns: Vec<FourierField> = (0..n)
        .map(|i| a.map_modes_to(Layout::Vector(n), |_, c| (0..n).map(|j| c[j * n + i]).collect()))
        .collect();
    let lie: Vec<FourierField> = columns.iter().map(|x| cartan(x, &eta)).collect::<Result<_>>()?;
    // Evaluate on coordinate frames: the coefficient of e^I is η(e_{i_0}, …, e_{i_p}).
    let out_basis = FormBasis::get(n, p + 1);
    let in_basis = FormBasis::get(n, p);
    let mut rhs = FourierField::zero(ctx, lhs.layout.clone());
    let support: std::collections::BTreeSet<Freq> = lie.iter().flat_map(|f| f.support().cloned()).collect();
    for k in support {
        let mut c = vec![Complex64::default(); out_basis.len()];
        for (pos, idx) in out_basis.indices().iter().enumerate() {
            for (r, axis) in idx.axes().enumerate() {
                let (_, rest) = idx.remove(axis).expect("axis in index");
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                if let Some(m) = lie[axis].mode(&k) {
                    c[pos] += m[in_basis.position(rest).expect("basis")] * sign;
                }
            }
        }
        rhs.add_mode(&k, &c, "evaluation")?;
    }
    compare(&lhs, &rhs)
}

fn commutator(rng: &mut ChaCha8Rng) -> Result<Sample> {
    let n = rng.random_range(3..=5);
    let ctx = TorusCtx::new(n);
    let p = random_degree(rng, n);
    let a = random_real_field(rng, ctx, Layout::Endo(n), 2, 2);
    let b = random_real_field(rng, ctx, Layout::Endo(n), 2, 2);
    let f = random_real_field(rng, ctx, Layout::forms(n, vec![p]), 2, 2);
    let lhs = lie_a(&a, &rho_hat_field(&b, &f)?)?.sub(&rho_hat_field(&b, &lie_a(&a, &f)?)?)?;
    let rhs = insert_tensor(&nijenhuis(&a, &b)?, &f)?.sub(&lie_a(&endo_product(&a, &b)?, &f)?)?;
    compare(&lhs, &rhs)
}

const MODELS: [ModelKind; 5] = [
    ModelKind::Symplectic { n: 2 },
    ModelKind::CalabiYau { n: 2 },
    ModelKind::HyperKahler { m: 1 },
    ModelKind::SLnC { n: 3 },
    ModelKind::G2,
];

/// Model, its `#` package and `Φ⁰` as a constant field.
struct Setting {
    model: CalibrationModel,
    pkg: HodgePackage,
    phi: FourierField,
}

fn settings() -> Result<Vec<Setting>> {
    MODELS
        .iter()
        .map(|&kind| {
            let model = build_model(kind)?;
            let pkg = HodgePackage::new(&model)?;
            let phi = FourierField::from_tuple(TorusCtx::new(model.dim()), model.real_phi0())?;
            Ok(Setting { model, pkg, phi })
        })
        .collect()
}

/// `a = h + DX + Σ f_i s_i` with `h` constant, `X` a vector field and `s_i` in
/// the isotropy algebra, so that `ρ̂_aΦ⁰ = ρ̂_hΦ⁰ + d i_XΦ⁰` is closed.
pub fn admissible_endo(rng: &mut ChaCha8Rng, model: &CalibrationModel, modes: usize) -> Result<FourierField> {
    let n = model.dim();
    let ctx = TorusCtx::new(n);
    let h = random_real_field(rng, ctx, Layout::Endo(n), 1, 0).scale_re(0.5);
    let x = random_real_field(rng, ctx, Layout::Vector(n), modes, 1).scale_re(0.2);
    let mut a = h.add(&jacobian(&x)?)?;
    let iso = isotropy_algebra(model)?;
    for col in iso.basis().column_iter().take(2) {
        let f = random_real_field(rng, ctx, Layout::forms(n, vec![0]), 1, 1);
        let s: Vec<Complex64> = col.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        let term = f.map_modes_to(Layout::Endo(n), |_, c| s.iter().map(|z| z * c[0]).collect());
        a = a.add(&term)?;
    }
    Ok(a)
}

fn quadratic_term(rng: &mut ChaCha8Rng, s: &Setting) -> Result<Sample> {
    let a = admissible_endo(rng, &s.model, 2)?;
    let closed = d(&rho_hat_field(&a, &s.phi)?)?.max_abs();
    debug_assert!(closed < 1e-9, "admissible endomorphism is not closed: {closed}");
    let lhs = d(&rho_hat_field(&a, &rho_hat_field(&a, &s.phi)?)?)?;
    let rhs = g_operator(&a, &a, &s.phi)?.scale_re(-1.0);
    let mut sample = compare(&lhs, &rhs)?;
    sample.membership = Some(s.pkg.subspace_residual(2, &lhs)?);
    Ok(sample)
}

/// `Ad^k_{ρ̂_a} G Φ = Σ_r C(k,r) (−1)^{k−r} ρ̂_a^r G ρ̂_a^{k−r} Φ`.
pub fn ad_power_g(a: &FourierField, phi: &FourierField, k: usize) -> Result<FourierField> {
    let rho_pow = |f: &FourierField, r: usize| -> Result<FourierField> {
        let mut g = f.clone();
        for _ in 0..r {
            g = rho_hat_field(a, &g)?;
        }
        Ok(g)
    };
    let mut out: Option<FourierField> = None;
    for r in 0..=k {
        let sign = if (k - r) % 2 == 0 { 1.0 } else { -1.0 };
        let inner = g_operator(a, a, &rho_pow(phi, k - r)?)?;
        let term = rho_pow(&inner, r)?.scale_re(sign * binomial(k, r) as f64);
        out = Some(match out {
            None => term,
            Some(o) => o.add(&term)?,
        });
    }
    Ok(out.expect("k + 1 terms"))
}

fn ad_powers(rng: &mut ChaCha8Rng, s: &Setting) -> Result<Sample> {
    let n = s.model.dim();
    let a = random_real_field(rng, TorusCtx::new(n), Layout::Endo(n), 1, 1).scale_re(0.5);
    let mut worst = 0.0f64;
    let mut norm = 0.0f64;
    for k in 0..=3 {
        let f = ad_power_g(&a, &s.phi, k)?;
        worst = worst.max(s.pkg.subspace_residual(2, &f)?);
        norm = norm.max(f.max_abs());
    }
    Ok(Sample { residual: 0.0, membership: Some(worst), lhs: norm, rhs: norm })
}

fn collect(name: &'static str, trials: usize, mut f: impl FnMut(usize) -> Result<Sample>) -> Result<IdentityReport> {
    let mut rep = IdentityReport { name, trials, max_residual: 0.0, max_membership: None, lhs_norm: 0.0, rhs_norm: 0.0 };
    for t in 0..trials {
        let s = f(t)?;
        if t == 0 || s.residual > rep.max_residual {
            rep.max_residual = s.residual;
            rep.lhs_norm = s.lhs;
            rep.rhs_norm = s.rhs;
        }
        if let Some(m) = s.membership {
            rep.max_membership = Some(rep.max_membership.unwrap_or(0.0).max(m));
        }
    }
    Ok(rep)
}

/// Runs every identity on `trials` random instances. Each identity draws from
/// its own stream derived from `seed`, so adding trials never changes earlier ones.
pub fn verify_identities(trials: usize, seed: u64) -> Result<Vec<IdentityReport>> {
    let stream = |i: u64| ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i));
    let settings = settings()?;
    let (mut r1, mut r2, mut r3, mut r4, mut r5) = (stream(1), stream(2), stream(3), stream(4), stream(5));
    Ok(vec![
        collect("anti-derivation", trials, |_| anti_derivation(&mut r1))?,
        collect("evaluation-formula", trials, |_| evaluation_formula(&mut r2))?,
        collect("commutator", trials, |_| commutator(&mut r3))?,
        collect("quadratic-term", trials, |t| quadratic_term(&mut r4, &settings[t % settings.len()]))?,
        collect("ad-powers", trials, |t| ad_powers(&mut r5, &settings[t % settings.len()]))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        for r in verify_identities(10, 7).unwrap() {
            assert!(r.pass(), "{r:?}");
        }
    }
}
