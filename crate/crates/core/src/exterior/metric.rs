use nalgebra::DMatrix;
use num_complex::Complex64;

use super::form::Form;
use super::ops::pullback_complex;
use crate::{Error, Result};

/// Inner product on `V`, given by its Gram matrix in the standard basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    gram: DMatrix<f64>,
}

impl Metric {
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        if gram.nrows() != gram.ncols() {
            return Err(Error::DimMismatch(gram.nrows(), gram.ncols()));
        }
        let asym = (&gram - gram.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::InvalidMetric(format!("asymmetry {asym:e}")));
        }
        let min = crate::linalg::symmetric_eigen(&gram).0.min();
        if gram.nrows() > 0 && min <= 0.0 {
            return Err(Error::InvalidMetric(format!("eigenvalue {min:e}")));
        }
        Ok(Metric { gram })
    }

    pub fn euclidean(n: usize) -> Self {
        Metric { gram: DMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn is_euclidean(&self) -> bool {
        self.gram == DMatrix::identity(self.dim(), self.dim())
    }
}

/// Orientation of `V` relative to `e^1 ∧ ... ∧ e^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

fn euclidean_star(orientation: Orientation, a: &Form) -> Form {
    let n = a.dim();
    let mut out = Form::zero(n, n - a.degree());
    for (idx, c) in a.iter() {
        let comp = idx.complement(n);
        let (s, _) = idx.wedge(comp).expect("disjoint");
        out.add_term(comp, c * (s * orientation.sign()));
    }
    out
}

/// Hodge star, complex-linear, characterized by `a ∧ *b = <a, b> vol`.
pub fn hodge_star(metric: &Metric, orientation: Orientation, a: &Form) -> Form {
    assert_eq!(metric.dim(), a.dim(), "metric dimension mismatch");
    if metric.is_euclidean() {
        return euclidean_star(orientation, a);
    }
    // Move to a G-orthonormal frame f_k = A e_k, with A = L^{-T} and G = L L^T.
    let l = metric
        .gram()
        .clone()
        .cholesky()
        .expect("metric is positive definite")
        .l();
    let a_mat = l.transpose().try_inverse().expect("cholesky factor invertible");
    let a_inv = l.transpose();
    let to_c = |m: &DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
    let frame = pullback_complex(&to_c(&a_mat), a);
    let starred = euclidean_star(orientation, &frame);
    pullback_complex(&to_c(&a_inv), &starred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{wedge, FormBasis, MultiIndex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seven_dim_example() {
        let a = Form::basis(7, &[0, 1, 2]).unwrap();
        let s = hodge_star(&Metric::euclidean(7), Orientation::Positive, &a);
        assert_eq!(s, Form::basis(7, &[3, 4, 5, 6]).unwrap());
    }

    #[test]
    fn involution_sign_on_basis_forms() {
        for n in 0..=8 {
            let m = Metric::euclidean(n);
            for p in 0..=n {
                let sign = if (p * (n - p)) % 2 == 0 { 1.0 } else { -1.0 };
                for idx in FormBasis::get(n, p).indices() {
                    let a = Form::from_terms(n, p, [(*idx, Complex64::new(1.0, 0.0))]).unwrap();
                    let ss = hodge_star(&m, Orientation::Negative, &hodge_star(&m, Orientation::Negative, &a));
                    assert!(ss.distance(&a.scale_re(sign)) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn general_metric_matches_gram_determinant_norm() {
        // <a, a>_G for a p-form uses the Gram determinants of the inverse metric:
        // <e^I, e^J> = det(G^{-1}[I, J]).
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 5;
        let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.5..0.5));
        let g = DMatrix::identity(n, n) + &b * b.transpose();
        let metric = Metric::new(g.clone()).unwrap();
        let ginv = g.try_inverse().unwrap();
        for p in 0..=n {
            let basis = FormBasis::get(n, p);
            let coeffs: Vec<f64> = (0..basis.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let a = Form::from_dense_real(n, p, &coeffs).unwrap();
            let mut oracle = 0.0;
            for (i, ci) in basis.indices().iter().zip(&coeffs) {
                for (j, cj) in basis.indices().iter().zip(&coeffs) {
                    let ri: Vec<usize> = i.to_vec();
                    let rj: Vec<usize> = j.to_vec();
                    let sub = DMatrix::from_fn(p, p, |r, c| ginv[(ri[r], rj[c])]);
                    oracle += ci * cj * if p == 0 { 1.0 } else { sub.determinant() };
                }
            }
            let top = wedge(&a, &hodge_star(&metric, Orientation::Positive, &a));
            let vol = top.coeff(MultiIndex::new(&(0..n).collect::<Vec<_>>()).unwrap()).re;
            // The Riemannian volume form is sqrt(det G) e^{1..n}.
            let sqrt_det = metric.gram().determinant().sqrt();
            assert!((vol / sqrt_det - oracle).abs() < 1e-10 * (1.0 + oracle.abs()), "p={p}");
        }
    }

    #[test]
    fn rejects_indefinite() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(Metric::new(g).is_err());
    }
}
