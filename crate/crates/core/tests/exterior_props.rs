use caldef::exterior::{
    binomial, hodge_star, interior, pullback, rho_hat, wedge, Endo, Form, Metric, MultiIndex, Orientation,
};
use caldef::Complex64;
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn form(dim: usize, deg: usize) -> impl Strategy<Value = Form> {
    prop::collection::vec(-1.0..1.0f64, binomial(dim, deg))
        .prop_map(move |v| Form::from_dense_real(dim, deg, &v).unwrap())
}

fn endo(dim: usize) -> impl Strategy<Value = Endo> {
    prop::collection::vec(-1.0..1.0f64, dim * dim).prop_map(move |v| Endo::from_row_slice(dim, &v).unwrap())
}

/// Three forms of degrees fitting a common dimension, with an endomorphism
/// and a vector of that dimension.
fn triple() -> impl Strategy<Value = (Form, Form, Form, Endo, Vec<f64>)> {
    (2usize..=6).prop_flat_map(|n| (Just(n), 0..=n, 0..=n, 0..=n)).prop_flat_map(|(n, p, q, r)| {
        (form(n, p), form(n, q), form(n, r), endo(n), prop::collection::vec(-1.0..1.0f64, n))
    })
}

/// A pair of positive degrees with room for their wedge, and a vector.
fn fitting_pair() -> impl Strategy<Value = (Form, Form, Vec<f64>)> {
    (2usize..=6)
        .prop_flat_map(|n| (Just(n), 1..n))
        .prop_flat_map(|(n, p)| (Just(n), Just(p), 1..=n - p))
        .prop_flat_map(|(n, p, q)| (form(n, p), form(n, q), prop::collection::vec(-1.0..1.0f64, n)))
}

fn close(a: &Form, b: &Form) -> bool {
    a.distance(b) <= TOL * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rho_hat_is_a_derivation((a, b, _, xi, _) in triple()) {
        let lhs = rho_hat(&xi, &wedge(&a, &b));
        let rhs = wedge(&rho_hat(&xi, &a), &b).add(&wedge(&a, &rho_hat(&xi, &b)));
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn interior_is_an_anti_derivation((a, b, v) in fitting_pair()) {
        let v = &v[..];
        let sign = if a.degree() % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = interior(v, &wedge(&a, &b));
        let rhs = wedge(&interior(v, &a), &b).add(&wedge(&a, &interior(v, &b)).scale_re(sign));
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn wedge_is_graded_commutative_and_associative((a, b, c, _, _) in triple()) {
        let sign = if (a.degree() * b.degree()) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(close(&wedge(&a, &b), &wedge(&b, &a).scale_re(sign)));
        prop_assert!(close(&wedge(&wedge(&a, &b), &c), &wedge(&a, &wedge(&b, &c))));
    }

    #[test]
    fn pullback_is_an_algebra_map((a, b, _, g, _) in triple()) {
        let lhs = pullback(&g, &wedge(&a, &b)).unwrap();
        let rhs = wedge(&pullback(&g, &a).unwrap(), &pullback(&g, &b).unwrap());
        prop_assert!(close(&lhs, &rhs));
    }
}

#[test]
fn star_squares_to_the_degree_sign() {
    for n in 0..=8 {
        let metric = Metric::euclidean(n);
        for p in 0..=n {
            let sign = if (p * (n - p)) % 2 == 0 { 1.0 } else { -1.0 };
            for idx in (0u32..1 << n).filter(|b| b.count_ones() as usize == p).map(MultiIndex::from_bits) {
                let e = Form::from_terms(n, p, [(idx, Complex64::new(1.0, 0.0))]).unwrap();
                let twice = hodge_star(&metric, Orientation::Positive, &hodge_star(&metric, Orientation::Positive, &e));
                assert!(twice.distance(&e.scale_re(sign)) < 1e-14, "n={n} p={p}");
            }
        }
    }
}
