use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::check::span;
use super::{CalibrationModel, ModelKind};
use crate::exterior::{interior, interior_basis, wedge, Form, FormBasis};
use crate::{Error, Result};

/// Orthogonal projectors onto the G2-irreducible pieces of `Λ²` and `Λ³`,
/// plus the operator `J: Λ³ → Λ⁴`.
#[derive(Clone, Debug)]
pub struct G2Structure {
    model: CalibrationModel,
    /// `Λ²₇, Λ²₁₄`.
    pub two: [DMatrix<f64>; 2],
    /// `Λ³₁, Λ³₇, Λ³₂₇`.
    pub three: [DMatrix<f64>; 3],
}

/// Applies a real projector to the real and imaginary parts of a form.
pub(crate) fn apply(p: &DMatrix<f64>, a: &Form) -> Form {
    let d = a.to_dense();
    let re = p * DVector::from_iterator(d.len(), d.iter().map(|z| z.re));
    let im = p * DVector::from_iterator(d.len(), d.iter().map(|z| z.im));
    let z: Vec<Complex64> = re.iter().zip(im.iter()).map(|(r, i)| Complex64::new(*r, *i)).collect();
    Form::from_dense(a.dim(), a.degree(), &z).expect("projector size")
}

pub(crate) fn projector(forms: &[Form], n: usize, p: usize) -> Result<DMatrix<f64>> {
    let len = FormBasis::get(n, p).len();
    let vecs: Vec<Vec<f64>> = forms.iter().map(Form::to_dense_real).collect();
    let q = span(&vecs, len)?;
    Ok(&q * q.transpose())
}

impl G2Structure {
    pub fn new(model: &CalibrationModel) -> Result<Self> {
        if model.kind() != ModelKind::G2 {
            return Err(Error::UnsupportedModel(format!("{} is not G2", model.kind())));
        }
        let phi = &model.phi0().parts()[0];
        let psi = &model.phi0().parts()[1];
        let id = |len: usize| DMatrix::<f64>::identity(len, len);
        let p27: Vec<Form> = (0..7).map(|a| interior_basis(a, phi)).collect();
        let p2_7 = projector(&p27, 7, 2)?;
        let p3_1 = projector(std::slice::from_ref(phi), 7, 3)?;
        let p37: Vec<Form> = (0..7).map(|a| interior_basis(a, psi)).collect();
        let p3_7 = projector(&p37, 7, 3)?;
        Ok(G2Structure {
            model: model.clone(),
            two: [p2_7.clone(), id(21) - p2_7],
            three: [p3_1.clone(), p3_7.clone(), id(35) - p3_1 - p3_7],
        })
    }

    pub fn phi(&self) -> &Form {
        &self.model.phi0().parts()[0]
    }

    pub fn psi(&self) -> &Form {
        &self.model.phi0().parts()[1]
    }

    pub fn star(&self, a: &Form) -> Form {
        self.model.star(a)
    }

    /// Components in the order `(7, 14)` for 2-forms and `(1, 7, 27)` for 3-forms.
    pub fn decompose(&self, a: &Form) -> Result<Vec<Form>> {
        let ps: &[DMatrix<f64>] = match a.degree() {
            2 => &self.two,
            3 => &self.three,
            d => return Err(Error::WrongDegree { expected: "2 or 3".into(), got: d }),
        };
        Ok(ps.iter().map(|p| apply(p, a)).collect())
    }

    /// Ranks of the projector images, `([7, 14], [1, 7, 27])`.
    pub fn ranks(&self) -> (Vec<usize>, Vec<usize>) {
        let r = |p: &DMatrix<f64>| p.trace().round() as usize;
        (self.two.iter().map(r).collect(), self.three.iter().map(r).collect())
    }

    /// `J(a) = (4/3) *π₁a + *π₇a − *π₂₇a`.
    pub fn j(&self, a: &Form) -> Result<Form> {
        if a.degree() != 3 {
            return Err(Error::WrongDegree { expected: "3".into(), got: a.degree() });
        }
        let c = self.decompose(a)?;
        Ok(self
            .star(&c[0])
            .scale_re(4.0 / 3.0)
            .add(&self.star(&c[1]))
            .sub(&self.star(&c[2])))
    }

    /// Projector onto `Λ⁵₁₄ = *Λ²₁₄`.
    pub fn lambda5_14(&self) -> Result<DMatrix<f64>> {
        let q = span(
            &FormBasis::get(7, 2)
                .indices()
                .iter()
                .map(|idx| {
                    let e = Form::from_terms(7, 2, [(*idx, Complex64::new(1.0, 0.0))]).expect("basis");
                    self.star(&apply(&self.two[1], &e)).to_dense_real()
                })
                .collect::<Vec<_>>(),
            21,
        )?;
        Ok(&q * q.transpose())
    }

    /// The contraction identity for the symbol of the second # map: with
    /// `v = u^♯`, `u∧η̂` the part of `u∧η` orthogonal to `u∧Λ²₇`, and
    /// `γ = i_v(u∧η̂) / (2‖u‖²)`, one has `u∧J(u∧η) = −2‖u‖² *γ`,
    /// `γ ∈ Λ²₁₄` and `i_v γ = 0`.
    pub fn contraction_identity(&self, u: &[f64], eta: &Form) -> Result<ContractionReport> {
        let uf = Form::covector(u);
        let u2: f64 = u.iter().map(|x| x * x).sum();
        let w = wedge(&uf, eta);
        let u_wedge_7: Vec<Form> = (0..7).map(|a| wedge(&uf, &interior_basis(a, self.phi()))).collect();
        let p = projector(&u_wedge_7, 7, 3)?;
        let w_hat = w.sub(&apply(&p, &w));
        let gamma = interior(u, &w_hat).scale_re(1.0 / (2.0 * u2));
        let lhs = wedge(&uf, &self.j(&w)?);
        let rhs = self.star(&gamma).scale_re(-2.0 * u2);
        let norm = 1.0f64.max(lhs.norm() + rhs.norm());
        let via_gamma = wedge(&uf, &self.j(&wedge(&uf, &gamma))?);
        Ok(ContractionReport {
            residual: lhs.sub(&rhs).norm() / norm,
            gamma_7: apply(&self.two[0], &gamma).norm() / norm,
            contraction: interior(u, &gamma).norm() / norm,
            intermediate_ratio: if via_gamma.norm() > 0.0 { lhs.norm() / via_gamma.norm() } else { 0.0 },
            gamma,
        })
    }
}

/// Outcome of [`G2Structure::contraction_identity`]; residuals are relative.
#[derive(Clone, Debug)]
pub struct ContractionReport {
    pub residual: f64,
    /// Size of the `Λ²₇` component of `γ`.
    pub gamma_7: f64,
    /// `‖i_v γ‖`.
    pub contraction: f64,
    /// `‖u∧J(u∧η)‖ / ‖u∧J(u∧γ)‖`.
    pub intermediate_ratio: f64,
    pub gamma: Form,
}

#[cfg(test)]
mod tests {
    use super::super::{build_model, ModelKind};
    use super::*;
    use crate::exterior::{rho_hat, Endo};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g2() -> G2Structure {
        G2Structure::new(&build_model(ModelKind::G2).unwrap()).unwrap()
    }

    #[test]
    fn ranks_and_membership() {
        let g = g2();
        assert_eq!(g.ranks(), (vec![7, 14], vec![1, 7, 27]));
        let c = g.decompose(g.phi()).unwrap();
        assert!(c[0].distance(g.phi()) < 1e-12 && c[1].max_abs() < 1e-12 && c[2].max_abs() < 1e-12);
        let e1phi = interior_basis(0, g.phi());
        assert!(g.decompose(&e1phi).unwrap()[0].distance(&e1phi) < 1e-12);
        assert!(g.decompose(&Form::zero(7, 4)).is_err());
    }

    #[test]
    fn fourteen_component_characterizations() {
        let g = g2();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vec<f64> = (0..21).map(|_| rng.random_range(-1.0..1.0)).collect();
        let gamma = apply(&g.two[1], &Form::from_dense_real(7, 2, &v).unwrap());
        assert!(wedge(&gamma, g.psi()).max_abs() < 1e-12);
        assert!(g.star(&gamma).add(&wedge(&gamma, g.phi())).max_abs() < 1e-12);
    }

    #[test]
    fn j_maps_rho_phi_to_rho_psi() {
        let g = g2();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<f64> = (0..49).map(|_| rng.random_range(-1.0..1.0)).collect();
        let xi = Endo::from_row_slice(7, &x).unwrap();
        let lhs = g.j(&rho_hat(&xi, g.phi())).unwrap();
        assert!(lhs.distance(&rho_hat(&xi, g.psi())) < 1e-12);
        assert!(g.j(g.phi()).unwrap().distance(&g.psi().scale_re(4.0 / 3.0)) < 1e-12);
    }

    #[test]
    fn contraction_identity_holds() {
        let g = g2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let u: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
            let e: Vec<f64> = (0..21).map(|_| rng.random_range(-1.0..1.0)).collect();
            let r = g.contraction_identity(&u, &Form::from_dense_real(7, 2, &e).unwrap()).unwrap();
            assert!(r.residual < 1e-12 && r.gamma_7 < 1e-12 && r.contraction < 1e-12, "{r:?}");
            assert!((r.intermediate_ratio - 2.0).abs() < 1e-9);
        }
    }
}
