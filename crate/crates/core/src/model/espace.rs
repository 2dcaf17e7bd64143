use nalgebra::DMatrix;

use super::CalibrationModel;
use crate::exterior::{wedge, Endo, Form, FormBasis, FormTuple, TupleLayout};
use crate::linalg::{null_space, Ambient, Subspace, RANK_TOL};
use crate::{Error, Result};

/// Largest `k` for which `E^k` is built.
pub const K_MAX: usize = 3;

/// Dense layout of `E^k`: the real blocks of `Φ⁰` shifted by `k − 1` degrees.
pub fn e_layout(model: &CalibrationModel, k: usize) -> TupleLayout {
    model.real_layout().shifted(k as isize - 1)
}

/// Spanning set of `E^k`: `i_{e_a}Φ⁰` for `k = 0`, `ρ̂_{E_ab}Φ⁰` for `k = 1`,
/// and `e^I ∧ i_{e_a}Φ⁰` over `|I| = k` otherwise.
pub fn e_generators(model: &CalibrationModel, k: usize) -> Vec<FormTuple> {
    let n = model.dim();
    let phi = model.real_phi0();
    match k {
        0 => (0..n).map(|a| phi.interior(&unit(n, a))).collect(),
        1 => (0..n * n)
            .map(|c| phi.rho_hat(&Endo::unit(n, c / n, c % n)))
            .collect(),
        _ => {
            let contractions: Vec<FormTuple> = (0..n).map(|a| phi.interior(&unit(n, a))).collect();
            let mut out = Vec::new();
            for idx in FormBasis::get(n, k).indices() {
                let beta = Form::from_terms(n, k, [(*idx, crate::Complex64::new(1.0, 0.0))])
                    .expect("basis index");
                for c in &contractions {
                    out.push(c.map(|f| wedge(&beta, f)));
                }
            }
            out
        }
    }
}

fn unit(n: usize, a: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[a] = 1.0;
    v
}

fn generator_matrix(layout: &TupleLayout, gens: &[FormTuple]) -> DMatrix<f64> {
    let cols: Vec<Vec<f64>> = gens
        .iter()
        .map(|g| layout.to_real_vec(g).expect("generator fits layout"))
        .collect();
    DMatrix::from_fn(layout.len(), cols.len(), |i, j| cols[j][i])
}

/// `E^k(V)` as a real subspace of the realified form space.
pub fn e_space(model: &CalibrationModel, k: usize) -> Result<Subspace> {
    if k > K_MAX {
        return Err(Error::Precondition(format!("E^{k} requested, k_max is {K_MAX}")));
    }
    if let Some(s) = model.espace_cache(k).get() {
        return Ok(s.clone());
    }
    let layout = e_layout(model, k);
    let gens = e_generators(model, k);
    let s = Subspace::from_generators(Ambient::Forms(layout.clone()), &generator_matrix(&layout, &gens))?;
    let _ = model.espace_cache(k).set(s.clone());
    Ok(s)
}

/// Columns `ρ̂_{E_ij}Φ⁰`, column index `i n + j`.
pub fn rho_generator_matrix(model: &CalibrationModel) -> DMatrix<f64> {
    generator_matrix(&e_layout(model, 1), &e_generators(model, 1))
}

/// `E^1` built instead from `θ ∧ i_v Φ⁰`.
pub fn e1_from_rho(model: &CalibrationModel) -> Result<Subspace> {
    let n = model.dim();
    let layout = e_layout(model, 1);
    let phi = model.real_phi0();
    let mut gens = Vec::new();
    for m in 0..n {
        let theta = Form::basis(n, &[m])?;
        for a in 0..n {
            gens.push(phi.interior(&unit(n, a)).wedge_left(&theta));
        }
    }
    Subspace::from_generators(Ambient::Forms(layout.clone()), &generator_matrix(&layout, &gens))
}

/// Kernel of `ξ ↦ ρ̂_ξ Φ⁰` in `gl(n)`, coordinates row-major.
pub fn isotropy_algebra(model: &CalibrationModel) -> Result<Subspace> {
    if let Some(s) = model.isotropy_cache().get() {
        return Ok(s.clone());
    }
    let n = model.dim();
    let k = null_space(&rho_generator_matrix(model), RANK_TOL)?;
    let s = Subspace::from_orthonormal(Ambient::Endo(n), k);
    let _ = model.isotropy_cache().set(s.clone());
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::super::{build_model, ModelKind};
    use super::*;

    fn ranks(kind: ModelKind) -> (usize, usize) {
        let m = build_model(kind).unwrap();
        (e_space(&m, 1).unwrap().rank(), isotropy_algebra(&m).unwrap().rank())
    }

    #[test]
    fn orbit_dimension_matches_e1() {
        for kind in [
            ModelKind::Symplectic { n: 2 },
            ModelKind::SLnC { n: 3 },
            ModelKind::CalabiYau { n: 3 },
            ModelKind::HyperKahler { m: 1 },
            ModelKind::G2,
            ModelKind::Spin7,
        ] {
            let n = kind.dim();
            let (e1, iso) = ranks(kind);
            assert_eq!(e1 + iso, n * n, "{kind}");
        }
    }

    #[test]
    fn known_ranks() {
        assert_eq!(ranks(ModelKind::HyperKahler { m: 1 }), (13, 3));
        assert_eq!(ranks(ModelKind::G2), (35, 14));
        assert_eq!(ranks(ModelKind::Spin7), (43, 21));
        assert_eq!(ranks(ModelKind::CalabiYau { n: 3 }), (28, 8));
        assert_eq!(ranks(ModelKind::SLnC { n: 3 }).0, 20);
    }

    #[test]
    fn two_e1_constructions_agree() {
        for kind in [ModelKind::G2, ModelKind::HyperKahler { m: 1 }, ModelKind::CalabiYau { n: 2 }] {
            let m = build_model(kind).unwrap();
            let a = e_space(&m, 1).unwrap();
            let b = e1_from_rho(&m).unwrap();
            assert!(a.distance(&b) < 1e-9, "{kind}");
        }
    }

    #[test]
    fn symplectic_espaces_are_full() {
        let m = build_model(ModelKind::Symplectic { n: 2 }).unwrap();
        assert_eq!(e_space(&m, 0).unwrap().rank(), 4);
        assert_eq!(e_space(&m, 1).unwrap().rank(), 6);
        assert_eq!(e_space(&m, 2).unwrap().rank(), 4);
        assert!(e_space(&m, K_MAX + 1).is_err());
    }
}
