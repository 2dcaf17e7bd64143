//! Differential and pointwise operators on Fourier fields. Pointwise products
//! become mode convolutions; derivatives multiply mode `k` by `2πi k`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use super::field::{FourierField, Layout};
use super::freq::Freq;
use super::tables::Tables;
use crate::exterior::{FormBasis, MultiIndex, TupleLayout};
use crate::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `2πi`.
pub(crate) const TWO_PI_I: Complex64 = Complex64::new(0.0, TAU);

/// `(degree, start, end)` of each block.
pub(crate) fn blocks(t: &TupleLayout) -> Vec<(usize, usize, usize)> {
    let off = t.offsets();
    t.degrees.iter().enumerate().map(|(i, &p)| (p, off[i], off[i + 1])).collect()
}

/// Bilinear mode convolution with a pointwise kernel.
pub fn convolve<F>(a: &FourierField, b: &FourierField, layout: Layout, context: &str, kernel: F) -> Result<FourierField>
where
    F: Fn(&Freq, &[Complex64], &Freq, &[Complex64], &mut [Complex64]),
{
    if a.ctx.n != b.ctx.n {
        return Err(Error::DimMismatch(a.ctx.n, b.ctx.n));
    }
    let len = layout.len();
    let mut out = FourierField::zero(a.ctx, layout);
    let mut acc: BTreeMap<Freq, Vec<Complex64>> = BTreeMap::new();
    for (k1, c1) in a.modes() {
        for (k2, c2) in b.modes() {
            let k = k1 + k2;
            out.check_cap(&k, context)?;
            let slot = acc.entry(k).or_insert_with(|| vec![ZERO; len]);
            kernel(k1, c1, k2, c2, slot);
        }
    }
    for (k, c) in acc {
        out.put(k, c);
    }
    Ok(out)
}

fn forms_layout(f: &FourierField) -> Result<TupleLayout> {
    Ok(f.layout.tuple()?.clone())
}

/// `d f`: mode `k` goes to `2πi k ∧ c_k`.
pub fn d(f: &FourierField) -> Result<FourierField> {
    let t = forms_layout(f)?;
    let out_layout = t.shifted(1);
    let tab = Tables::get(t.dim);
    let (bi, bo) = (blocks(&t), blocks(&out_layout));
    Ok(f.map_modes_to(Layout::Forms(out_layout.clone()), |k, c| {
        let kk = k.as_f64();
        let mut out = vec![ZERO; out_layout.len()];
        for ((p, s, e), (_, so, eo)) in bi.iter().zip(&bo) {
            tab.wedge_covector(&kk, TWO_PI_I, &c[*s..*e], *p, &mut out[*so..*eo]);
        }
        out
    }))
}

/// Flat `L²` adjoint of `d`: mode `k` goes to `−2πi ι_k c_k`. Degree-0 blocks
/// map to zero degree-0 blocks.
pub fn codifferential(f: &FourierField) -> Result<FourierField> {
    let t = forms_layout(f)?;
    let out_layout = t.shifted(-1);
    let tab = Tables::get(t.dim);
    let (bi, bo) = (blocks(&t), blocks(&out_layout));
    Ok(f.map_modes_to(Layout::Forms(out_layout.clone()), |k, c| {
        let kk: Vec<Complex64> = k.0.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect();
        let mut out = vec![ZERO; out_layout.len()];
        for ((p, s, e), (_, so, eo)) in bi.iter().zip(&bo) {
            tab.interior(&kk, -TWO_PI_I, &c[*s..*e], *p, &mut out[*so..*eo]);
        }
        out
    }))
}

/// Flat Hodge Laplacian `dd* + d*d`, assembled block by block from `d` and `d*`.
pub fn laplacian(f: &FourierField) -> Result<FourierField> {
    let t = forms_layout(f)?;
    let mut out = FourierField::zero(f.ctx, f.layout.clone());
    for (p, s, e) in blocks(&t) {
        let single = TupleLayout::new(t.dim, vec![p]);
        let part = f.map_modes_to(Layout::Forms(single.clone()), |_, c| c[s..e].to_vec());
        let mut lap = codifferential(&d(&part)?)?;
        if p > 0 {
            lap = lap.add(&d(&codifferential(&part)?)?)?;
        }
        let len = t.len();
        let embedded = lap.map_modes_to(f.layout.clone(), |_, c| {
            let mut v = vec![ZERO; len];
            v[s..e].copy_from_slice(c);
            v
        });
        out = out.add(&embedded)?;
    }
    Ok(out)
}

/// `β ∧ f` for a single-block form field `β` and a form-tuple field `f`.
pub fn wedge_fields(beta: &FourierField, f: &FourierField) -> Result<FourierField> {
    let tb = forms_layout(beta)?;
    if tb.degrees.len() != 1 {
        return Err(Error::Layout("left factor of wedge_fields must be a single form".into()));
    }
    let q = tb.degrees[0];
    let t = forms_layout(f)?;
    let out_layout = TupleLayout::new(t.dim, t.degrees.iter().map(|p| p + q).collect());
    let tab = Tables::get(t.dim);
    let (bi, bo) = (blocks(&t), blocks(&out_layout));
    convolve(beta, f, Layout::Forms(out_layout), "wedge", |_, a, _, c, out| {
        for ((p, s, e), (_, so, eo)) in bi.iter().zip(&bo) {
            tab.wedge(a, q, &c[*s..*e], *p, ONE, &mut out[*so..*eo]);
        }
    })
}

fn endo_dim(a: &FourierField) -> Result<usize> {
    match a.layout {
        Layout::Endo(n) => Ok(n),
        ref other => Err(Error::Layout(format!("expected endomorphism field, got {other:?}"))),
    }
}

fn vector_dim(a: &FourierField) -> Result<usize> {
    match a.layout {
        Layout::Vector(n) => Ok(n),
        ref other => Err(Error::Layout(format!("expected vector field, got {other:?}"))),
    }
}

/// `ρ̂_a f`, pointwise `Σ a_jm e^m ∧ i_{e_j}`.
pub fn rho_hat_field(a: &FourierField, f: &FourierField) -> Result<FourierField> {
    endo_dim(a)?;
    let t = forms_layout(f)?;
    let tab = Tables::get(t.dim);
    let bi = blocks(&t);
    convolve(a, f, f.layout.clone(), "rho_hat", |_, xi, _, c, out| {
        for (p, s, e) in &bi {
            tab.rho_hat(xi, ONE, &c[*s..*e], *p, &mut out[*s..*e]);
        }
    })
}

/// `i_v f` for a vector field `v`.
pub fn interior_field(v: &FourierField, f: &FourierField) -> Result<FourierField> {
    vector_dim(v)?;
    let t = forms_layout(f)?;
    let out_layout = t.shifted(-1);
    let tab = Tables::get(t.dim);
    let (bi, bo) = (blocks(&t), blocks(&out_layout));
    convolve(v, f, Layout::Forms(out_layout), "interior", |_, x, _, c, out| {
        for ((p, s, e), (_, so, eo)) in bi.iter().zip(&bo) {
            tab.interior(x, ONE, &c[*s..*e], *p, &mut out[*so..*eo]);
        }
    })
}

/// Vector field bracket `[X, Y]^j = X^i ∂_i Y^j − Y^i ∂_i X^j`.
pub fn lie_of_vector(x: &FourierField, y: &FourierField) -> Result<FourierField> {
    let n = vector_dim(x)?;
    vector_dim(y)?;
    convolve(x, y, Layout::Vector(n), "vector bracket", |k1, a, k2, b, out| {
        let xd: Complex64 = (0..n).map(|i| a[i] * k2.0[i] as f64).sum();
        let yd: Complex64 = (0..n).map(|i| b[i] * k1.0[i] as f64).sum();
        for j in 0..n {
            out[j] += TWO_PI_I * (xd * b[j] - yd * a[j]);
        }
    })
}

/// Jacobian field `(DX)_jm = ∂_m X^j`, so that `ρ̂_{DX}Φ = d i_X Φ` for constant `Φ`.
pub fn jacobian(x: &FourierField) -> Result<FourierField> {
    let n = vector_dim(x)?;
    Ok(x.map_modes_to(Layout::Endo(n), |k, c| {
        let mut out = vec![ZERO; n * n];
        for j in 0..n {
            for m in 0..n {
                out[j * n + m] = TWO_PI_I * k.0[m] as f64 * c[j];
            }
        }
        out
    }))
}

/// Pointwise matrix product `(ab)_jm = Σ_i a_ji b_im`.
pub fn endo_product(a: &FourierField, b: &FourierField) -> Result<FourierField> {
    let n = endo_dim(a)?;
    endo_dim(b)?;
    convolve(a, b, Layout::Endo(n), "endo product", |_, x, _, y, out| {
        for j in 0..n {
            for i in 0..n {
                let xji = x[j * n + i];
                if xji == ZERO {
                    continue;
                }
                for m in 0..n {
                    out[j * n + m] += xji * y[i * n + m];
                }
            }
        }
    })
}

/// `L_a f = ρ̂_a(df) − d(ρ̂_a f)`.
pub fn lie_a(a: &FourierField, f: &FourierField) -> Result<FourierField> {
    rho_hat_field(a, &d(f)?)?.sub(&d(&rho_hat_field(a, f)?)?)
}

/// Position of `θ^p ∧ θ^q` (`p < q`) in the 2-form basis.
fn pair_position(n: usize, p: usize, q: usize) -> usize {
    FormBasis::get(n, 2)
        .position(MultiIndex::new(&[p, q]).expect("p < q"))
        .expect("basis")
}

/// The `Λ²⊗T`-valued tensor `N(a, b)` with `[L_a, ρ̂_b] = i_{N(a,b)} − L_{ab}`.
/// Block `j` of the result is the 2-form `K^j = Σ_{p<q} N^j_pq θ^p∧θ^q`.
pub fn nijenhuis(a: &FourierField, b: &FourierField) -> Result<FourierField> {
    let n = endo_dim(a)?;
    endo_dim(b)?;
    let pos: Vec<Vec<usize>> = (0..n)
        .map(|p| (0..n).map(|q| if p < q { pair_position(n, p, q) } else { usize::MAX }).collect())
        .collect();
    let block = FormBasis::get(n, 2).len();
    convolve(a, b, Layout::tensor(n), "nijenhuis", |k1, x, k2, y, out| {
        // ∂ acting on a contributes 2πi k1, on b 2πi k2.
        let m = |j: usize, p: usize, q: usize| -> Complex64 {
            let mut s = ZERO;
            for i in 0..n {
                s += x[i * n + p] * k2.0[i] as f64 * y[j * n + q];
                s -= y[i * n + q] * k1.0[i] as f64 * x[j * n + p];
                s += x[j * n + i] * k2.0[q] as f64 * y[i * n + p];
                s += y[j * n + i] * k1.0[q] as f64 * x[i * n + p];
            }
            s
        };
        for j in 0..n {
            for p in 0..n {
                for q in p + 1..n {
                    out[j * block + pos[p][q]] += TWO_PI_I * (m(j, p, q) - m(j, q, p));
                }
            }
        }
    })
}

/// `i_K f = Σ_j K^j ∧ i_{e_j} f` for a `Λ²⊗T` tensor field `K`.
pub fn insert_tensor(k: &FourierField, f: &FourierField) -> Result<FourierField> {
    let t = forms_layout(f)?;
    let n = t.dim;
    if k.layout != Layout::tensor(n) {
        return Err(Error::Layout(format!("expected Λ²⊗T field, got {:?}", k.layout)));
    }
    let out_layout = t.shifted(1);
    let tab = Tables::get(n);
    let (bi, bo) = (blocks(&t), blocks(&out_layout));
    let block = FormBasis::get(n, 2).len();
    convolve(k, f, Layout::Forms(out_layout), "tensor insertion", |_, kc, _, c, out| {
        for ((p, s, e), (_, so, eo)) in bi.iter().zip(&bo) {
            if *p == 0 {
                continue;
            }
            for j in 0..n {
                let kj = &kc[j * block..(j + 1) * block];
                if kj.iter().all(|z| *z == ZERO) {
                    continue;
                }
                let mut tmp = vec![ZERO; FormBasis::get(n, p - 1).len()];
                tab.interior_axis(j, ONE, &c[*s..*e], *p, &mut tmp);
                tab.wedge(kj, 2, &tmp, p - 1, ONE, &mut out[*so..*eo]);
            }
        }
    })
}

/// `G(a, b) f = i_{N(a,b)} f − L_{ab} f`.
pub fn g_operator(a: &FourierField, b: &FourierField, f: &FourierField) -> Result<FourierField> {
    insert_tensor(&nijenhuis(a, b)?, f)?.sub(&lie_a(&endo_product(a, b)?, f)?)
}

/// Splits `f` into its de Rham harmonic part (mode 0) and `G f`, the flat Green
/// operator dividing mode `k` by `|2πk|²`.
pub fn hodge_green_derham(f: &FourierField) -> Result<(FourierField, FourierField)> {
    forms_layout(f)?;
    let zero = Freq::zero(f.ctx.n);
    let mut harm = FourierField::zero(f.ctx, f.layout.clone());
    let mut green = FourierField::zero(f.ctx, f.layout.clone());
    for (k, c) in f.modes() {
        if *k == zero {
            harm.put(k.clone(), c.to_vec());
        } else {
            let w = 1.0 / k.eigenvalue();
            green.put(k.clone(), c.iter().map(|z| z * w).collect());
        }
    }
    Ok((harm, green))
}
