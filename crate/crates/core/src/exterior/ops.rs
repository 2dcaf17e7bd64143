use nalgebra::DMatrix;
use num_complex::Complex64;

use super::endo::Endo;
use super::form::Form;
use super::index::MultiIndex;
use super::tuple::FormTuple;
use crate::{Error, Result};

fn check_dim(a: usize, b: usize) {
    assert_eq!(a, b, "forms live in different dimensions");
}

/// Exterior product. A degree sum above `n` yields the zero form of that degree.
///
/// Panics when the dimensions differ.
pub fn wedge(a: &Form, b: &Form) -> Form {
    check_dim(a.dim(), b.dim());
    let mut out = Form::zero(a.dim(), a.degree() + b.degree());
    for (i, x) in a.iter() {
        for (j, y) in b.iter() {
            if let Some((s, k)) = i.wedge(j) {
                out.add_term(k, x * y * s);
            }
        }
    }
    out
}

/// `i_{e_axis} a`.
pub fn interior_basis(axis: usize, a: &Form) -> Form {
    if a.degree() == 0 {
        return Form::zero(a.dim(), 0);
    }
    let mut out = Form::zero(a.dim(), a.degree() - 1);
    for (i, x) in a.iter() {
        if let Some((s, k)) = i.remove(axis) {
            out.add_term(k, x * s);
        }
    }
    out
}

/// `i_v a` for a real vector `v`.
pub fn interior(v: &[f64], a: &Form) -> Form {
    check_dim(v.len(), a.dim());
    let c: Vec<Complex64> = v.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    interior_complex(&c, a)
}

/// `i_v a` for a complexified vector `v`.
pub fn interior_complex(v: &[Complex64], a: &Form) -> Form {
    check_dim(v.len(), a.dim());
    if a.degree() == 0 {
        return Form::zero(a.dim(), 0);
    }
    let mut out = Form::zero(a.dim(), a.degree() - 1);
    for (i, x) in a.iter() {
        for axis in i.axes() {
            if v[axis] == Complex64::default() {
                continue;
            }
            let (s, k) = i.remove(axis).expect("axis in index");
            out.add_term(k, x * v[axis] * s);
        }
    }
    out
}

/// Infinitesimal pullback `ρ̂_ξ a = Σ_{j,m} ξ_jm e^m ∧ i_{e_j} a`.
pub fn rho_hat(xi: &Endo, a: &Form) -> Form {
    let n = a.dim();
    check_dim(xi.dim(), n);
    let mut out = Form::zero(n, a.degree());
    for (i, x) in a.iter() {
        for j in i.axes() {
            let (s1, rest) = i.remove(j).expect("axis in index");
            for m in 0..n {
                let c = xi.entry(j, m);
                if c == 0.0 {
                    continue;
                }
                if let Some((s2, k)) = MultiIndex::single(m).wedge(rest) {
                    out.add_term(k, x * (c * s1 * s2));
                }
            }
        }
    }
    out
}

/// Coframe substitution `e^i ↦ Σ_j c_ij e^j`, extended as an algebra map.
pub fn pullback_complex(c: &DMatrix<Complex64>, a: &Form) -> Form {
    let n = a.dim();
    check_dim(c.nrows(), n);
    let images: Vec<Form> = (0..n)
        .map(|i| {
            let mut f = Form::zero(n, 1);
            for j in 0..n {
                f.add_term(MultiIndex::single(j), c[(i, j)]);
            }
            f
        })
        .collect();
    let mut out = Form::zero(n, a.degree());
    for (idx, x) in a.iter() {
        let mut term = Form::scalar(n, x);
        for i in idx.axes() {
            term = wedge(&term, &images[i]);
        }
        out.add_assign_scaled(Complex64::new(1.0, 0.0), &term);
    }
    out
}

/// Pullback `(ρ_g a)(v_1, ...) = a(g v_1, ...)`.
pub fn pullback(g: &Endo, a: &Form) -> Result<Form> {
    check_dim(g.dim(), a.dim());
    let sv = g.matrix().clone().svd(false, false).singular_values;
    let max = sv.max();
    if g.dim() > 0 && (max == 0.0 || sv.min() <= 1e-14 * max) {
        return Err(Error::NotInvertible);
    }
    Ok(pullback_complex(&g.matrix().map(|x| Complex64::new(x, 0.0)), a))
}

/// Partial sum `Σ_{m ≤ order} ρ̂_ξ^m Φ / m!`, componentwise.
pub fn exp_action(xi: &Endo, phi: &FormTuple, order: usize) -> FormTuple {
    let parts = phi
        .parts()
        .iter()
        .map(|p| {
            let mut sum = p.clone();
            let mut term = p.clone();
            for m in 1..=order {
                term = rho_hat(xi, &term).scale_re(1.0 / m as f64);
                sum = sum.add(&term);
            }
            sum
        })
        .collect();
    FormTuple::new(parts).expect("shape preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    pub(crate) fn random_form(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Form {
        let basis = super::super::FormBasis::get(n, p);
        let v: Vec<Complex64> = (0..basis.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Form::from_dense(n, p, &v).unwrap()
    }

    fn random_endo(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Endo {
        let v: Vec<f64> = (0..n * n).map(|_| rng.random_range(-scale..scale)).collect();
        Endo::from_row_slice(n, &v).unwrap()
    }

    #[test]
    fn dx1_wedge_dx2() {
        let e1 = Form::basis(3, &[0]).unwrap();
        let e2 = Form::basis(3, &[1]).unwrap();
        assert_eq!(wedge(&e1, &e2), Form::basis(3, &[0, 1]).unwrap());
    }

    #[test]
    fn wedge_above_top_degree_is_zero() {
        let a = Form::basis(3, &[0, 1]).unwrap();
        let w = wedge(&a, &a);
        assert!(w.is_zero());
        assert_eq!(w.degree(), 4);
    }

    #[test]
    fn wedge_matches_alternation_oracle() {
        // Evaluate both sides on all increasing 5-tuples of basis vectors via
        // the shuffle-free full permutation sum.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eta = random_form(&mut rng, 7, 2);
        let phi = random_form(&mut rng, 7, 3);
        let w = wedge(&eta, &phi);
        let eval = |f: &Form, args: &[usize]| -> Complex64 {
            // f on basis vectors: coefficient with sign of sorting permutation
            let mut sorted = args.to_vec();
            let mut sign = 1.0;
            for i in 0..sorted.len() {
                for j in 0..sorted.len() - 1 - i {
                    if sorted[j] > sorted[j + 1] {
                        sorted.swap(j, j + 1);
                        sign = -sign;
                    }
                }
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Complex64::default();
            }
            f.coeff(MultiIndex::new(&sorted).unwrap()) * sign
        };
        for idx in super::super::FormBasis::get(7, 5).indices() {
            let args = idx.to_vec();
            let mut total = Complex64::default();
            for perm in permutations(5) {
                let sgn = perm_sign(&perm);
                let v: Vec<usize> = perm.iter().map(|&p| args[p]).collect();
                total += eval(&eta, &v[..2]) * eval(&phi, &v[2..]) * sgn;
            }
            total /= 2.0 * 6.0;
            assert!((total - w.coeff(*idx)).norm() < 1e-12);
        }
    }

    fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(k - 1) {
            for pos in 0..k {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }

    fn perm_sign(p: &[usize]) -> f64 {
        let mut inv = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 { 1.0 } else { -1.0 }
    }

    #[test]
    fn odd_forms_square_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_form(&mut rng, 6, 3);
        assert!(wedge(&a, &a).max_abs() < 1e-12);
    }

    #[test]
    fn interior_examples() {
        let a = Form::basis(3, &[0, 1]).unwrap();
        assert_eq!(interior_basis(0, &a), Form::basis(3, &[1]).unwrap());
        assert_eq!(interior_basis(1, &a), Form::basis(3, &[0]).unwrap().scale_re(-1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_form(&mut rng, 5, 3);
        let v: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!(interior(&v, &interior(&v, &f)).max_abs() < 1e-14);
        assert!(interior(&v, &Form::scalar(5, c(2.0))).is_zero());
    }

    #[test]
    fn rho_hat_identity_scales_by_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_form(&mut rng, 6, 3);
        let r = rho_hat(&Endo::identity(6), &a);
        assert!(r.distance(&a.scale_re(3.0)) < 1e-14);
    }

    #[test]
    fn rho_hat_rank_one_convention() {
        // ξ = e_1 ⊗ θ^2 sends e_2 to e_1.
        let xi = Endo::unit(3, 0, 1);
        let dx1 = Form::basis(3, &[0]).unwrap();
        assert_eq!(rho_hat(&xi, &dx1), Form::basis(3, &[1]).unwrap());
    }

    #[test]
    fn rho_hat_is_an_antihomomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let xi = random_endo(&mut rng, 5, 1.0);
            let eta = random_endo(&mut rng, 5, 1.0);
            let a = random_form(&mut rng, 5, 2);
            let lhs = rho_hat(&xi, &rho_hat(&eta, &a)).sub(&rho_hat(&eta, &rho_hat(&xi, &a)));
            let rhs = rho_hat(&eta.commutator(&xi), &a);
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn pullback_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_form(&mut rng, 4, 2);
        assert!(pullback(&Endo::identity(4), &a).unwrap().distance(&a) < 1e-14);
        let s = Endo::identity(4).scale(1.5);
        assert!(pullback(&s, &a).unwrap().distance(&a.scale_re(2.25)) < 1e-13);
        let mut sing = Endo::identity(4);
        sing = sing.compose(&Endo::unit(4, 0, 0));
        assert!(matches!(pullback(&sing, &a), Err(Error::NotInvertible)));
    }

    #[test]
    fn pullback_composes_contravariantly() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = Endo::identity(4).add(&random_endo(&mut rng, 4, 0.3));
        let h = Endo::identity(4).add(&random_endo(&mut rng, 4, 0.3));
        let a = random_form(&mut rng, 4, 2);
        let lhs = pullback(&g.compose(&h), &a).unwrap();
        let rhs = pullback(&h, &pullback(&g, &a).unwrap()).unwrap();
        assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn exp_action_matches_matrix_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let mut xi = random_endo(&mut rng, 5, 1.0);
            let nrm = xi.norm();
            if nrm > 1.0 {
                xi = xi.scale(1.0 / nrm);
            }
            let a = random_form(&mut rng, 5, 3);
            let t = FormTuple::new(vec![a.clone()]).unwrap();
            let series = exp_action(&xi, &t, 25);
            let exact = pullback(&xi.exp(), &a).unwrap();
            assert!(series.parts()[0].distance(&exact) < 1e-10);
            assert_eq!(exp_action(&xi, &t, 0), t);
        }
    }

    #[test]
    fn exp_action_first_order_identity() {
        let a = Form::basis(4, &[0, 1]).unwrap();
        let b = Form::basis(4, &[0, 1, 2]).unwrap();
        let t = FormTuple::new(vec![a.clone(), b.clone()]).unwrap();
        let r = exp_action(&Endo::identity(4), &t, 1);
        assert_eq!(r.parts()[0], a.scale_re(3.0));
        assert_eq!(r.parts()[1], b.scale_re(4.0));
    }
}
