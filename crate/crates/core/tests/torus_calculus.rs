use caldef::exterior::{binomial, interior, Endo, Form, FormTuple, TupleLayout};
use caldef::identities::random_real_field;
use caldef::linalg::numerical_rank;
use caldef::model::{
    build_model, e_layout, e_space, hodge_type, kahler_form, wedge_matrix, ModelKind, Spin7Structure,
};
use caldef::torus::{codifferential, d, rho_hat_field, wedge_fields, FourierField, Freq, Layout, TorusCtx};
use caldef::Complex64;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_layout(rng: &mut ChaCha8Rng, n: usize) -> Layout {
    let blocks = rng.random_range(1..=2);
    Layout::forms(n, (0..blocks).map(|_| rng.random_range(0..n)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squares_to_zero(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = random_layout(&mut rng, n);
        let f = random_real_field(&mut rng, TorusCtx::new(n), layout, 3, 2);
        let scale = d(&f).unwrap().max_abs().max(1.0);
        prop_assert!(d(&d(&f).unwrap()).unwrap().max_abs() <= 1e-13 * scale);
    }

    #[test]
    fn codifferential_is_the_adjoint(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = TorusCtx::new(n);
        let layout = random_layout(&mut rng, n);
        let f = random_real_field(&mut rng, ctx, layout, 4, 1);
        let g0 = d(&f).unwrap();
        let g = random_real_field(&mut rng, ctx, g0.layout.clone(), 4, 1);
        let lhs = d(&f).unwrap().inner(&g).unwrap();
        let rhs = f.inner(&codifferential(&g).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }
}

fn tuple_at(f: &FourierField, x: &[f64]) -> FormTuple {
    f.layout.tuple().unwrap().from_complex_vec(&f.evaluate(x)).unwrap()
}

fn real_endo_at(a: &FourierField, x: &[f64]) -> Endo {
    let v: Vec<f64> = a.evaluate(x).iter().map(|z| z.re).collect();
    Endo::from_row_slice(a.ctx.n, &v).unwrap()
}

/// Eighth-order central difference of `f` along `axis` at `x` with step `h`.
fn partial(f: &FourierField, x: &[f64], axis: usize, h: f64) -> Vec<Complex64> {
    const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let mut out = vec![Complex64::default(); f.layout.len()];
    for (j, w) in W.iter().enumerate() {
        let step = (j + 1) as f64 * h;
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[axis] += step;
        xm[axis] -= step;
        for ((o, p), m) in out.iter_mut().zip(f.evaluate(&xp)).zip(f.evaluate(&xm)) {
            *o += (p - m) * (w / h);
        }
    }
    out
}

fn finite_difference_check(kind: ModelKind, seed: u64) {
    let model = build_model(kind).unwrap();
    let n = model.dim();
    let ctx = TorusCtx::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = FourierField::from_tuple(ctx, model.real_phi0()).unwrap();
    let h = 1.0 / 32.0;
    for _ in 0..4 {
        let k = Freq((0..n).map(|_| rng.random_range(-1..=1)).collect());
        let c: Vec<Complex64> =
            (0..n * n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let a = FourierField::single(ctx, Layout::Endo(n), k, c).unwrap();
        let f = rho_hat_field(&a, &phi).unwrap();
        let df = d(&f).unwrap();
        let layout = f.layout.tuple().unwrap().clone();
        for _ in 0..16 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..32) as f64 * h).collect();
            let mut fd = FormTuple::zero(&layout.shifted(1));
            for axis in 0..n {
                let e = Form::basis(n, &[axis]).unwrap();
                let p = layout.from_complex_vec(&partial(&f, &x, axis, h)).unwrap();
                fd = fd.add(&p.wedge_left(&e));
            }
            let exact = tuple_at(&df, &x);
            let scale = df.max_abs().max(1.0);
            assert!(fd.distance(&exact) < 1e-6 * scale, "{kind}: {}", fd.distance(&exact));
        }
    }
}

#[test]
fn d_of_rho_hat_matches_finite_differences_symplectic() {
    finite_difference_check(ModelKind::Symplectic { n: 2 }, 1);
}

#[test]
fn d_of_rho_hat_matches_finite_differences_calabi_yau() {
    finite_difference_check(ModelKind::CalabiYau { n: 3 }, 2);
}

#[test]
fn products_match_pointwise_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [3, 4, 5] {
        let ctx = TorusCtx::new(n);
        let beta = random_real_field(&mut rng, ctx, Layout::forms(n, vec![1]), 3, 2);
        let f = random_real_field(&mut rng, ctx, Layout::forms(n, vec![1, 2]), 3, 2);
        let a = random_real_field(&mut rng, ctx, Layout::Endo(n), 3, 2);
        let w = wedge_fields(&beta, &f).unwrap();
        let r = rho_hat_field(&a, &f).unwrap();
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..32) as f64 / 32.0).collect();
            let b = tuple_at(&beta, &x).parts()[0].clone();
            let fx = tuple_at(&f, &x);
            assert!(tuple_at(&w, &x).distance(&fx.wedge_left(&b)) < 1e-8);
            assert!(tuple_at(&r, &x).distance(&fx.rho_hat(&real_endo_at(&a, &x))) < 1e-8);
        }
    }
}

fn random_frequencies(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    while out.len() < count {
        let k: Vec<f64> = (0..n).map(|_| rng.random_range(-3..=3) as f64).collect();
        if k.iter().any(|&v| v != 0.0) {
            out.push(k);
        }
    }
    out
}

fn dense_basis(n: usize, p: usize) -> Vec<Form> {
    (0..binomial(n, p))
        .map(|i| {
            let mut v = vec![0.0; binomial(n, p)];
            v[i] = 1.0;
            Form::from_dense_real(n, p, &v).unwrap()
        })
        .collect()
}

fn columns(forms: &[Form]) -> DMatrix<f64> {
    let rows = forms.first().map_or(0, |f| f.to_dense_real().len());
    DMatrix::from_fn(rows, forms.len(), |i, j| forms[j].to_dense_real()[i])
}

#[test]
fn closed_primitive_11_modes_vanish() {
    let omega = kahler_form(6, 3);
    let mut gens: Vec<Form> = dense_basis(6, 2).iter().map(|b| hodge_type(b, 1, 1).re()).collect();
    gens.push(omega.clone());
    let span = caldef::linalg::column_space(&columns(&gens), 1e-9).unwrap();
    assert_eq!(span.ncols(), 9);
    let w = omega.to_dense_real();
    let w = nalgebra::DVector::from_vec(w.clone()) / nalgebra::DVector::from_vec(w).norm();
    let primitive = &span - &w * (w.transpose() * &span);
    let primitive = caldef::linalg::column_space(&primitive, 1e-9).unwrap();
    assert_eq!(primitive.ncols(), 8);
    let layout = TupleLayout::new(6, vec![2]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in random_frequencies(&mut rng, 6, 40) {
        let m = wedge_matrix(&k, &layout) * &primitive;
        assert_eq!(numerical_rank(&m, 1e-9), 8, "k = {k:?}");
    }
}

#[test]
fn g2_exact_first_order_modes_come_from_degree_zero() {
    let model = build_model(ModelKind::G2).unwrap();
    let e0 = e_space(&model, 0).unwrap();
    let e1 = e_space(&model, 1).unwrap();
    let layout0 = e_layout(&model, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for k in random_frequencies(&mut rng, 7, 40) {
        let full = wedge_matrix(&k, &layout0);
        let image = caldef::linalg::column_space(&full, 1e-9).unwrap();
        let b = e1.basis();
        let meet = numerical_rank(&image, 1e-9) + e1.rank() - numerical_rank(&{
            let mut m = DMatrix::zeros(b.nrows(), image.ncols() + b.ncols());
            m.view_mut((0, 0), (b.nrows(), image.ncols())).copy_from(&image);
            m.view_mut((0, image.ncols()), b.shape()).copy_from(b);
            m
        }, 1e-9);
        let from_e0 = numerical_rank(&(&full * e0.basis()), 1e-9);
        assert_eq!(meet, from_e0, "k = {k:?}");
    }
}

#[test]
fn spin7_cayley_components_are_detected_by_pi8_of_contraction() {
    let model = build_model(ModelKind::Spin7).unwrap();
    let s = Spin7Structure::new(&model).unwrap();
    let domain = caldef::linalg::column_space(&(&s.four[0] + &s.four[1]), 1e-9).unwrap();
    assert_eq!(domain.ncols(), 8);
    let basis = dense_basis(8, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for k in random_frequencies(&mut rng, 8, 40) {
        let contract: Vec<Form> = basis.iter().map(|b| interior(&k, b)).collect();
        let m = &s.three[0] * columns(&contract) * &domain;
        assert_eq!(numerical_rank(&m, 1e-9), 8, "k = {k:?}");
    }
}
