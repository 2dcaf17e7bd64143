use nalgebra::DMatrix;
use num_complex::Complex64;

use super::espace::isotropy_algebra;
use super::g2::{apply, projector};
use super::{CalibrationModel, ModelKind};
use crate::exterior::{interior_basis, rho_hat, Endo, Form, FormBasis, MultiIndex};
use crate::{Error, Result};

/// Orthogonal projectors onto the Spin(7)-irreducible pieces of `Λ²`, `Λ³`, `Λ⁴`.
#[derive(Clone, Debug)]
pub struct Spin7Structure {
    model: CalibrationModel,
    /// `Λ²₇, Λ²₂₁`.
    pub two: [DMatrix<f64>; 2],
    /// `Λ³₈, Λ³₄₈`.
    pub three: [DMatrix<f64>; 2],
    /// `Λ⁴₁, Λ⁴₇, Λ⁴₂₇, Λ⁴₃₅`.
    pub four: [DMatrix<f64>; 4],
}

/// `Σ_{a<b} ξ_ab e^{ab}` for a skew matrix `ξ`.
pub fn skew_to_form(xi: &DMatrix<f64>) -> Form {
    let n = xi.nrows();
    let mut f = Form::zero(n, 2);
    for a in 0..n {
        for b in a + 1..n {
            f.add_term(MultiIndex::new(&[a, b]).expect("sorted"), Complex64::new(xi[(a, b)], 0.0));
        }
    }
    f
}

pub fn form_to_skew(f: &Form) -> DMatrix<f64> {
    let n = f.dim();
    let mut m = DMatrix::zeros(n, n);
    for (idx, c) in f.iter() {
        let ax = idx.to_vec();
        m[(ax[0], ax[1])] = c.re;
        m[(ax[1], ax[0])] = -c.re;
    }
    m
}

impl Spin7Structure {
    pub fn new(model: &CalibrationModel) -> Result<Self> {
        if model.kind() != ModelKind::Spin7 {
            return Err(Error::UnsupportedModel(format!("{} is not Spin7", model.kind())));
        }
        let cayley = &model.phi0().parts()[0];
        let id = |len: usize| DMatrix::<f64>::identity(len, len);
        let iso = isotropy_algebra(model)?;
        let iso_forms: Vec<Form> = iso
            .basis()
            .column_iter()
            .map(|c| skew_to_form(&DMatrix::from_row_slice(8, 8, c.as_slice())))
            .collect();
        let p2_21 = projector(&iso_forms, 8, 2)?;
        let p2_7 = id(28) - &p2_21;
        let p3_8 = projector(&(0..8).map(|a| interior_basis(a, cayley)).collect::<Vec<_>>(), 8, 3)?;
        let p4_1 = projector(std::slice::from_ref(cayley), 8, 4)?;
        let seven: Vec<Form> = FormBasis::get(8, 2)
            .indices()
            .iter()
            .map(|idx| {
                let e = Form::from_terms(8, 2, [(*idx, Complex64::new(1.0, 0.0))]).expect("basis");
                let xi = Endo::new(form_to_skew(&apply(&p2_7, &e))).expect("square");
                rho_hat(&xi, cayley)
            })
            .collect();
        let p4_7 = projector(&seven, 8, 4)?;
        let self_dual: Vec<Form> = FormBasis::get(8, 4)
            .indices()
            .iter()
            .map(|idx| {
                let e = Form::from_terms(8, 4, [(*idx, Complex64::new(1.0, 0.0))]).expect("basis");
                e.add(&model.star(&e))
            })
            .collect();
        let p_sd = projector(&self_dual, 8, 4)?;
        Ok(Spin7Structure {
            model: model.clone(),
            two: [p2_7, p2_21],
            three: [p3_8.clone(), id(56) - p3_8],
            four: [p4_1.clone(), p4_7.clone(), &p_sd - p4_1 - p4_7, id(70) - p_sd],
        })
    }

    pub fn cayley(&self) -> &Form {
        &self.model.phi0().parts()[0]
    }

    /// Components `(7, 21)`, `(8, 48)` or `(1, 7, 27, 35)` by degree.
    pub fn decompose(&self, a: &Form) -> Result<Vec<Form>> {
        let ps: &[DMatrix<f64>] = match a.degree() {
            2 => &self.two,
            3 => &self.three,
            4 => &self.four,
            d => return Err(Error::WrongDegree { expected: "2, 3 or 4".into(), got: d }),
        };
        Ok(ps.iter().map(|p| apply(p, a)).collect())
    }

    pub fn ranks(&self) -> Vec<Vec<usize>> {
        let r = |p: &DMatrix<f64>| p.trace().round() as usize;
        vec![
            self.two.iter().map(r).collect(),
            self.three.iter().map(r).collect(),
            self.four.iter().map(r).collect(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_model, ModelKind};
    use super::*;

    fn s7() -> Spin7Structure {
        Spin7Structure::new(&build_model(ModelKind::Spin7).unwrap()).unwrap()
    }

    #[test]
    fn ranks_match_representation_dimensions() {
        assert_eq!(s7().ranks(), vec![vec![7, 21], vec![8, 48], vec![1, 7, 27, 35]]);
    }

    #[test]
    fn projectors_are_a_resolution_of_identity() {
        let s = s7();
        for ps in [&s.two[..], &s.three[..], &s.four[..]] {
            let len = ps[0].nrows();
            let sum = ps.iter().fold(DMatrix::zeros(len, len), |acc, p| acc + p);
            assert!((sum - DMatrix::<f64>::identity(len, len)).abs().max() < 1e-10);
            for (i, p) in ps.iter().enumerate() {
                assert!((p * p - p).abs().max() < 1e-10);
                for q in &ps[i + 1..] {
                    assert!((p * q).abs().max() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn cayley_and_anti_self_dual_pieces() {
        let s = s7();
        let c = s.decompose(s.cayley()).unwrap();
        assert!(c[0].distance(s.cayley()) < 1e-12);
        let e = Form::basis(8, &[0, 1, 2, 3]).unwrap();
        let asd = e.sub(&s.model.star(&e));
        let c = s.decompose(&asd).unwrap();
        assert!(c[3].distance(&asd) < 1e-12);
    }
}
