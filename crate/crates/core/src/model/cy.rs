use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::check::span;
use super::{cy_constant, CalibrationModel, ModelKind};
use crate::exterior::{pullback_complex, wedge, Form, FormBasis, MultiIndex};
use crate::{Error, Result};

/// Coframe change `e ↦ (dz, dz̄)`: axes `2j` and `2j+1` become `dz_j` and `dz̄_j`.
fn to_complex_frame(a: &Form) -> Form {
    let n = a.dim();
    let half = Complex64::new(0.5, 0.0);
    let ihalf = Complex64::new(0.0, 0.5);
    let mut c = DMatrix::zeros(n, n);
    for j in 0..n / 2 {
        c[(2 * j, 2 * j)] = half;
        c[(2 * j, 2 * j + 1)] = half;
        c[(2 * j + 1, 2 * j)] = -ihalf;
        c[(2 * j + 1, 2 * j + 1)] = ihalf;
    }
    pullback_complex(&c, a)
}

fn from_complex_frame(b: &Form) -> Form {
    let n = b.dim();
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut c = DMatrix::zeros(n, n);
    for j in 0..n / 2 {
        c[(2 * j, 2 * j)] = one;
        c[(2 * j, 2 * j + 1)] = i;
        c[(2 * j + 1, 2 * j)] = one;
        c[(2 * j + 1, 2 * j + 1)] = -i;
    }
    pullback_complex(&c, b)
}

fn bidegree(idx: MultiIndex) -> (usize, usize) {
    let p = idx.axes().filter(|a| a % 2 == 0).count();
    (p, idx.degree() - p)
}

/// Component of type `(p, q)` with respect to the flat complex structure
/// `dz_j = dx_j + i dy_j` on `R^{2n}` with interleaved coordinates.
pub fn hodge_type(a: &Form, p: usize, q: usize) -> Form {
    let b = to_complex_frame(a);
    let mut keep = Form::zero(a.dim(), a.degree());
    for (idx, c) in b.iter() {
        if bidegree(idx) == (p, q) {
            keep.add_term(idx, c);
        }
    }
    from_complex_frame(&keep)
}

/// Components and residuals of a candidate tangent vector `(α, β)` to the
/// Calabi-Yau orbit.
#[derive(Clone, Debug)]
pub struct CyTangentSplit {
    /// `‖α ∧ ω + Ω ∧ β‖`.
    pub eq_wedge: f64,
    /// `‖α ∧ Ω̄ + Ω ∧ ᾱ − n c_n β ∧ ω^{n−1}‖`.
    pub eq_volume: f64,
    pub alpha_n0: Form,
    pub alpha_primitive: Form,
    /// `α^{n−2,0} ∧ ω`, the non-primitive part of `α^{n−1,1}`.
    pub alpha_lefschetz: Form,
    /// Components of other types, zero for tangent vectors.
    pub alpha_rest: Form,
    pub beta_20: Form,
    pub beta_primitive: Form,
    pub beta_00: Complex64,
    pub beta_02: Form,
    /// `‖α^{n−2,0} ∧ ω ∧ ω + Ω ∧ β^{0,2}‖`.
    pub eq_pair_lefschetz: f64,
    /// `‖α^{n,0} ∧ Ω̄ + Ω ∧ conj(α^{n,0}) − n c_n β^{0,0} ω^n‖`.
    pub eq_pair_volume: f64,
    pub member: bool,
}

/// Hermitian projection of `a` onto the complex span of `spanning`.
fn complex_projection(a: &Form, spanning: &[Form]) -> Result<Form> {
    let len = FormBasis::get(a.dim(), a.degree()).len();
    let realify = |f: &Form| -> Vec<f64> {
        let d = f.to_dense();
        d.iter().map(|z| z.re).chain(d.iter().map(|z| z.im)).collect()
    };
    let mut vecs = Vec::new();
    for s in spanning {
        vecs.push(realify(s));
        vecs.push(realify(&s.scale(Complex64::new(0.0, 1.0))));
    }
    let q = span(&vecs, 2 * len)?;
    let x = DVector::from_vec(realify(a));
    let p = &q * (q.transpose() * x);
    let z: Vec<Complex64> = (0..len).map(|i| Complex64::new(p[i], p[i + len])).collect();
    Form::from_dense(a.dim(), a.degree(), &z)
}

pub fn cy_tangent_split(model: &CalibrationModel, alpha: &Form, beta: &Form) -> Result<CyTangentSplit> {
    let ModelKind::CalabiYau { n } = model.kind() else {
        return Err(Error::UnsupportedModel(format!("{} is not Calabi-Yau", model.kind())));
    };
    let dim = 2 * n;
    if alpha.degree() != n || alpha.dim() != dim {
        return Err(Error::WrongDegree { expected: format!("{n}-form on R^{dim}"), got: alpha.degree() });
    }
    if beta.degree() != 2 || beta.dim() != dim {
        return Err(Error::WrongDegree { expected: format!("2-form on R^{dim}"), got: beta.degree() });
    }
    let big = &model.phi0().parts()[0];
    let w = &model.phi0().parts()[1];
    let cn = cy_constant(n);
    let nf = Complex64::new(n as f64, 0.0);
    let w_pow = |k: usize| (0..k).fold(Form::scalar(dim, Complex64::new(1.0, 0.0)), |acc, _| wedge(&acc, w));

    let eq_wedge = wedge(alpha, w).add(&wedge(big, beta)).max_abs();
    let eq_volume = wedge(alpha, &big.conj())
        .add(&wedge(big, &alpha.conj()))
        .sub(&wedge(beta, &w_pow(n - 1)).scale(nf * cn))
        .max_abs();

    let alpha_n0 = hodge_type(alpha, n, 0);
    let alpha_n11 = hodge_type(alpha, n - 1, 1);
    let alpha_lefschetz = if n >= 2 {
        let gens: Vec<Form> = FormBasis::get(n, n - 2)
            .indices()
            .iter()
            .map(|idx| {
                let axes: Vec<usize> = idx.axes().map(|j| 2 * j).collect();
                let dz = from_complex_frame(&Form::basis(dim, &axes).expect("in range"));
                wedge(&dz, w)
            })
            .collect();
        complex_projection(&alpha_n11, &gens)?
    } else {
        Form::zero(dim, n)
    };
    let alpha_primitive = alpha_n11.sub(&alpha_lefschetz);
    let alpha_rest = alpha.sub(&alpha_n0).sub(&alpha_n11);

    let beta_20 = hodge_type(beta, 2, 0);
    let beta_11 = hodge_type(beta, 1, 1);
    let beta_02 = hodge_type(beta, 0, 2);
    let beta_00 = w.inner(&beta_11) / w.inner(w);
    let beta_primitive = beta_11.sub(&w.scale(beta_00));

    let eq_pair_lefschetz = wedge(&alpha_lefschetz, w).add(&wedge(big, &beta_02)).max_abs();
    let eq_pair_volume = wedge(&alpha_n0, &big.conj())
        .add(&wedge(big, &alpha_n0.conj()))
        .sub(&w_pow(n).scale(nf * cn * beta_00))
        .max_abs();

    let scale = 1.0f64.max(alpha.max_abs()).max(beta.max_abs());
    let member = eq_wedge < 1e-10 * scale && eq_volume < 1e-10 * scale;
    Ok(CyTangentSplit {
        eq_wedge,
        eq_volume,
        alpha_n0,
        alpha_primitive,
        alpha_lefschetz,
        alpha_rest,
        beta_20,
        beta_primitive,
        beta_00,
        beta_02,
        eq_pair_lefschetz,
        eq_pair_volume,
        member,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{build_model, e_space};
    use super::*;

    fn cy3() -> CalibrationModel {
        build_model(ModelKind::CalabiYau { n: 3 }).unwrap()
    }

    #[test]
    fn scaling_direction_is_tangent() {
        let m = cy3();
        let big = m.phi0().parts()[0].clone();
        let w = m.phi0().parts()[1].clone();
        let s = cy_tangent_split(&m, &big, &w.scale_re(2.0 / 3.0)).unwrap();
        assert!(s.member, "{s:?}");
        assert!(s.eq_pair_volume < 1e-12);
        assert!((s.beta_00.re - 2.0 / 3.0).abs() < 1e-12);
        let rotation = cy_tangent_split(&m, &big.scale(Complex64::new(0.0, 1.0)), &Form::zero(6, 2)).unwrap();
        assert!(rotation.member);
        let bare = cy_tangent_split(&m, &big, &Form::zero(6, 2)).unwrap();
        assert!(!bare.member && bare.eq_volume > 1.0);
    }

    #[test]
    fn primitive_real_11_form_is_tangent() {
        let m = cy3();
        // dx1∧dy1 − dx2∧dy2 is real, of type (1,1) and orthogonal to ω.
        let b = Form::basis(6, &[0, 1]).unwrap().sub(&Form::basis(6, &[2, 3]).unwrap());
        let s = cy_tangent_split(&m, &Form::zero(6, 3), &b).unwrap();
        assert!(s.member);
        assert!(s.beta_primitive.distance(&b) < 1e-12);
        assert!(s.beta_00.norm() < 1e-12);
    }

    #[test]
    fn types_of_flat_forms() {
        let m = cy3();
        let big = &m.phi0().parts()[0];
        assert!(hodge_type(big, 3, 0).distance(big) < 1e-12);
        let w = &m.phi0().parts()[1];
        assert!(hodge_type(w, 1, 1).distance(w) < 1e-12);
        assert!(hodge_type(w, 2, 0).max_abs() < 1e-12);
    }

    #[test]
    fn tangent_equations_cut_out_e1() {
        // Every realified E^1 vector satisfies both equations; the pairings
        // of the Lefschetz components then hold as well.
        let m = cy3();
        let e1 = e_space(&m, 1).unwrap();
        for t in e1.tuples().unwrap().iter().take(28) {
            let p = t.parts();
            let alpha = p[0].axpy(Complex64::new(0.0, 1.0), &p[1]);
            let s = cy_tangent_split(&m, &alpha, &p[2]).unwrap();
            assert!(s.member, "{s:?}");
            assert!(s.alpha_rest.max_abs() < 1e-10);
            assert!(s.eq_pair_lefschetz < 1e-10);
            assert!(s.eq_pair_volume < 1e-10);
        }
    }
}
