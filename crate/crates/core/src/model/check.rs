use nalgebra::DMatrix;
use num_complex::Complex64;

use super::espace::isotropy_algebra;
use super::{cy_constant, CalibrationModel, ModelKind};
use crate::exterior::{interior_basis, wedge, Form, FormBasis};
use crate::linalg::{column_space, null_space, numerical_rank, RANK_TOL};
use crate::Result;

/// `W[(a, b)] = ω(e_a, e_b)` for the real part of a 2-form.
pub fn two_form_matrix(w: &Form) -> DMatrix<f64> {
    let n = w.dim();
    let mut m = DMatrix::zeros(n, n);
    for (idx, c) in w.iter() {
        let ax = idx.to_vec();
        m[(ax[0], ax[1])] += c.re;
        m[(ax[1], ax[0])] -= c.re;
    }
    m
}

/// Realification of a complex matrix acting on `x + i y` as `(x; y)`.
fn realify(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Complex basis of `Ker Ω = {v ∈ V ⊗ C : i_v Ω = 0}`, as columns.
pub fn kernel_basis(big: &Form) -> Result<DMatrix<Complex64>> {
    let n = big.dim();
    let target = FormBasis::get(n, big.degree().saturating_sub(1));
    let m = DMatrix::from_fn(target.len(), n, |row, a| interior_basis(a, big).to_dense()[row]);
    let real_null = null_space(&realify(&m), RANK_TOL)?;
    let mut chosen: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    let mut rank = 0;
    for col in real_null.column_iter() {
        let z = nalgebra::DVector::from_fn(n, |i, _| Complex64::new(col[i], col[i + n]));
        let mut trial = chosen.clone();
        trial.push(z.clone());
        let r = numerical_rank(&realify(&DMatrix::from_columns(&trial)), RANK_TOL);
        if r > rank {
            rank = r;
            chosen.push(z);
        }
    }
    Ok(if chosen.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&chosen) })
}

/// Complex dimension of `Ker Ω + conj(Ker Ω)`.
fn transversal_rank(k: &DMatrix<Complex64>) -> usize {
    let (r, c) = k.shape();
    let both = DMatrix::from_fn(r, 2 * c, |i, j| if j < c { k[(i, j)] } else { k[(i, j - c)].conj() });
    numerical_rank(&realify(&both), RANK_TOL) / 2
}

/// Real complex structure `I` with `Ker Ω` as its `−i` eigenspace.
pub fn complex_structure(big: &Form) -> Result<Option<DMatrix<f64>>> {
    let k = kernel_basis(big)?;
    let n = big.dim();
    if 2 * k.ncols() != n || transversal_rank(&k) != n {
        return Ok(None);
    }
    let h = n / 2;
    let i = Complex64::new(0.0, 1.0);
    let p = DMatrix::from_fn(n, n, |r, c| if c < h { k[(r, c)].conj() } else { k[(r, c - h)] });
    let d = DMatrix::from_fn(n, n, |r, c| if r != c { Complex64::default() } else if r < h { i } else { -i });
    let Some(pinv) = p.clone().try_inverse() else {
        return Ok(None);
    };
    Ok(Some((p * d * pinv).map(|z| z.re)))
}

fn power(w: &Form, n: usize) -> Form {
    (0..n).fold(Form::scalar(w.dim(), Complex64::new(1.0, 0.0)), |acc, _| wedge(&acc, w))
}

/// Positivity residual of `g(u, v) = ω(u, I v)`: count of non-positive
/// eigenvalues plus the magnitude of the most negative one.
fn positivity(w: &Form, big: &Form) -> Result<(f64, f64)> {
    let Some(i) = complex_structure(big)? else {
        return Ok((f64::INFINITY, f64::INFINITY));
    };
    let g = two_form_matrix(w) * i;
    let asym = (&g - g.transpose()).abs().max();
    let sym = (&g + g.transpose()) * 0.5;
    let eig = crate::linalg::symmetric_eigen(&sym).0;
    let scale = eig.abs().max().max(1.0);
    let bad = eig.iter().filter(|&&l| l <= 1e-12 * scale).count() as f64;
    Ok((bad + (-eig.min()).max(0.0), asym))
}

/// Residuals of the defining equations of the model's structure.
pub fn check_model(model: &CalibrationModel) -> Result<Vec<(String, f64)>> {
    let parts = model.phi0().parts();
    let n = model.dim();
    let mut out = Vec::new();
    match model.kind() {
        ModelKind::Symplectic { .. } | ModelKind::DegenerateSymplectic => {
            let r = numerical_rank(&two_form_matrix(&parts[0]), RANK_TOL);
            out.push(("nondegeneracy".into(), (n - r) as f64));
        }
        ModelKind::SLnC { n: h } => {
            let k = kernel_basis(&parts[0])?;
            out.push(("ker-dim".into(), (k.ncols() as f64 - h as f64).abs()));
            out.push(("transversality".into(), (n - transversal_rank(&k)) as f64));
        }
        ModelKind::CalabiYau { n: h } => {
            let (big, w) = (&parts[0], &parts[1]);
            out.push(("Omega^omega".into(), wedge(big, w).max_abs()));
            out.push(("conj(Omega)^omega".into(), wedge(&big.conj(), w).max_abs()));
            let ma = wedge(big, &big.conj()).sub(&power(w, h).scale(cy_constant(h)));
            out.push(("monge-ampere".into(), ma.max_abs()));
            let (pos, asym) = positivity(w, big)?;
            out.push(("positivity".into(), pos));
            out.push(("metric-symmetry".into(), asym));
        }
        ModelKind::HyperKahler { .. } => {
            let i = two_form_matrix(&parts[0]).transpose();
            let j = two_form_matrix(&parts[1].re()).transpose();
            let k = two_form_matrix(&parts[1].im()).transpose();
            let id = DMatrix::<f64>::identity(n, n);
            for (name, m) in [("I^2", &i * &i), ("J^2", &j * &j), ("K^2", &k * &k), ("IJK", &i * &j * &k)] {
                out.push((name.into(), (m + &id).abs().max()));
            }
        }
        ModelKind::G2 | ModelKind::Spin7 => {
            let expected = if model.kind() == ModelKind::G2 { 14.0 } else { 21.0 };
            let dim = isotropy_algebra(model)?.rank() as f64;
            out.push(("isotropy-dim".into(), (dim - expected).abs()));
            let residual = if model.kind() == ModelKind::G2 {
                model.star(&parts[0]).distance(&parts[1])
            } else {
                model.star(&parts[0]).distance(&parts[0])
            };
            out.push(("star-relation".into(), residual));
        }
    }
    Ok(out)
}

/// Orthonormal real basis spanning the given real vectors; convenience for
/// the decompositions.
pub(crate) fn span(vectors: &[Vec<f64>], len: usize) -> Result<DMatrix<f64>> {
    let m = DMatrix::from_fn(len, vectors.len(), |i, j| vectors[j][i]);
    column_space(&m, RANK_TOL)
}

#[cfg(test)]
mod tests {
    use super::super::{build_model, holomorphic_volume, CalibrationModel, ModelKind};
    use super::*;
    use crate::exterior::{FormTuple, Orientation};

    fn max_residual(m: &CalibrationModel) -> f64 {
        check_model(m).unwrap().iter().map(|r| r.1).fold(0.0, f64::max)
    }

    #[test]
    fn flat_models_satisfy_their_equations() {
        for kind in [
            ModelKind::Symplectic { n: 3 },
            ModelKind::SLnC { n: 3 },
            ModelKind::CalabiYau { n: 3 },
            ModelKind::CalabiYau { n: 2 },
            ModelKind::HyperKahler { m: 2 },
            ModelKind::G2,
            ModelKind::Spin7,
        ] {
            let m = build_model(kind).unwrap();
            assert!(max_residual(&m) < 1e-12, "{kind}: {:?}", check_model(&m).unwrap());
        }
    }

    #[test]
    fn rescaled_volume_keeps_kernel() {
        let big = holomorphic_volume(6, 3).scale_re(2.0);
        let m = CalibrationModel::with_forms(
            ModelKind::SLnC { n: 3 },
            FormTuple::new(vec![big]).unwrap(),
            Orientation::Positive,
        )
        .unwrap();
        assert!(max_residual(&m) < 1e-12);
    }

    #[test]
    fn degenerate_kahler_form_fails() {
        let big = holomorphic_volume(4, 2);
        let w = Form::basis(4, &[0, 1]).unwrap();
        let m = CalibrationModel::with_forms(
            ModelKind::CalabiYau { n: 2 },
            FormTuple::new(vec![big, w]).unwrap(),
            Orientation::Positive,
        )
        .unwrap();
        let res = check_model(&m).unwrap();
        let get = |k: &str| res.iter().find(|r| r.0 == k).unwrap().1;
        assert!(get("monge-ampere") >= 1.0);
        assert!(get("positivity") >= 1.0);
        let deg = build_model(ModelKind::DegenerateSymplectic).unwrap();
        assert_eq!(check_model(&deg).unwrap()[0].1, 2.0);
    }

    #[test]
    fn flat_complex_structure_rotates_pairs() {
        let i = complex_structure(&holomorphic_volume(4, 2)).unwrap().unwrap();
        // I ∂x = ∂y, I ∂y = −∂x
        assert!((i[(1, 0)] - 1.0).abs() < 1e-12 && (i[(0, 1)] + 1.0).abs() < 1e-12);
    }
}
