//! Dense index tables for pointwise exterior operations on coefficient slices.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::exterior::{FormBasis, MultiIndex};

/// Precomputed structure constants for `Λ^*(R^n)` in the lexicographic basis.
#[derive(Debug)]
pub struct Tables {
    pub n: usize,
    /// `wedge_axis[p][m][i]`: `e^m ∧ e^{I_i}` as `(target, sign)`.
    wedge_axis: Vec<Vec<Vec<Option<(u32, f64)>>>>,
    /// `interior_axis[p][m][i]`: `i_{e_m} e^{I_i}` as `(target, sign)`.
    interior_axis: Vec<Vec<Vec<Option<(u32, f64)>>>>,
    /// `rho[p]`: entries `(i, j·n + m, target, sign)` with
    /// `ρ̂_ξ e^{I_i} = Σ ξ_jm · sign · e^{target}`.
    rho: Vec<Vec<(u32, u32, u32, f64)>>,
    products: Mutex<HashMap<(usize, usize), Arc<Vec<(u32, u32, u32, f64)>>>>,
}

impl Tables {
    pub fn get(n: usize) -> Arc<Tables> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Tables>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut g = cache.lock().unwrap_or_else(|e| e.into_inner());
        g.entry(n).or_insert_with(|| Arc::new(Tables::build(n))).clone()
    }

    fn build(n: usize) -> Tables {
        let bases: Vec<_> = (0..=n).map(|p| FormBasis::get(n, p)).collect();
        let mut wedge_axis = Vec::new();
        let mut interior_axis = Vec::new();
        let mut rho = Vec::new();
        for p in 0..=n {
            let b = &bases[p];
            let mut w = Vec::new();
            let mut it = Vec::new();
            for m in 0..n {
                let e = MultiIndex::single(m);
                w.push(
                    b.indices()
                        .iter()
                        .map(|&i| {
                            e.wedge(i).map(|(s, t)| (bases[p + 1].position(t).expect("basis") as u32, s))
                        })
                        .collect(),
                );
                it.push(
                    b.indices()
                        .iter()
                        .map(|&i| i.remove(m).map(|(s, t)| (bases[p - 1].position(t).expect("basis") as u32, s)))
                        .collect(),
                );
            }
            wedge_axis.push(w);
            interior_axis.push(it);
            let mut r = Vec::new();
            for (pos, &idx) in b.indices().iter().enumerate() {
                for j in idx.axes() {
                    let (s1, rest) = idx.remove(j).expect("axis present");
                    for m in 0..n {
                        if let Some((s2, t)) = MultiIndex::single(m).wedge(rest) {
                            let target = b.position(t).expect("same degree");
                            r.push((pos as u32, (j * n + m) as u32, target as u32, s1 * s2));
                        }
                    }
                }
            }
            rho.push(r);
        }
        Tables { n, wedge_axis, interior_axis, rho, products: Mutex::new(HashMap::new()) }
    }

    fn product_table(&self, p: usize, q: usize) -> Arc<Vec<(u32, u32, u32, f64)>> {
        let mut g = self.products.lock().unwrap_or_else(|e| e.into_inner());
        g.entry((p, q))
            .or_insert_with(|| {
                let (bp, bq, br) = (FormBasis::get(self.n, p), FormBasis::get(self.n, q), FormBasis::get(self.n, p + q));
                let mut out = Vec::new();
                for (i, &a) in bp.indices().iter().enumerate() {
                    for (j, &b) in bq.indices().iter().enumerate() {
                        if let Some((s, t)) = a.wedge(b) {
                            out.push((i as u32, j as u32, br.position(t).expect("basis") as u32, s));
                        }
                    }
                }
                Arc::new(out)
            })
            .clone()
    }

    /// `out += s · (k ∧ c)` for a covector `k` and a `p`-form `c`.
    pub fn wedge_covector(&self, k: &[f64], s: Complex64, c: &[Complex64], p: usize, out: &mut [Complex64]) {
        if p >= self.n {
            return;
        }
        for (m, &km) in k.iter().enumerate() {
            if km == 0.0 {
                continue;
            }
            for (i, entry) in self.wedge_axis[p][m].iter().enumerate() {
                if let Some((t, sign)) = entry {
                    out[*t as usize] += c[i] * s * (km * sign);
                }
            }
        }
    }

    /// `out += s · i_v c` for a complex vector `v` and a `p`-form `c`.
    pub fn interior(&self, v: &[Complex64], s: Complex64, c: &[Complex64], p: usize, out: &mut [Complex64]) {
        if p == 0 {
            return;
        }
        for (m, &vm) in v.iter().enumerate() {
            if vm == Complex64::default() {
                continue;
            }
            let f = vm * s;
            for (i, entry) in self.interior_axis[p][m].iter().enumerate() {
                if let Some((t, sign)) = entry {
                    out[*t as usize] += c[i] * f * *sign;
                }
            }
        }
    }

    /// `out += s · i_{e_m} c`.
    pub fn interior_axis(&self, m: usize, s: Complex64, c: &[Complex64], p: usize, out: &mut [Complex64]) {
        if p == 0 {
            return;
        }
        for (i, entry) in self.interior_axis[p][m].iter().enumerate() {
            if let Some((t, sign)) = entry {
                out[*t as usize] += c[i] * s * *sign;
            }
        }
    }

    /// `out += s · ρ̂_ξ c` with `ξ` row-major.
    pub fn rho_hat(&self, xi: &[Complex64], s: Complex64, c: &[Complex64], p: usize, out: &mut [Complex64]) {
        for &(i, jm, t, sign) in &self.rho[p] {
            let x = xi[jm as usize];
            let ci = c[i as usize];
            if x == Complex64::default() || ci == Complex64::default() {
                continue;
            }
            out[t as usize] += x * ci * s * sign;
        }
    }

    /// `out += s · (a ∧ b)` for a `p`-form `a` and a `q`-form `b`.
    pub fn wedge(&self, a: &[Complex64], p: usize, b: &[Complex64], q: usize, s: Complex64, out: &mut [Complex64]) {
        if p + q > self.n {
            return;
        }
        for &(i, j, t, sign) in self.product_table(p, q).iter() {
            let (x, y) = (a[i as usize], b[j as usize]);
            if x == Complex64::default() || y == Complex64::default() {
                continue;
            }
            out[t as usize] += x * y * s * sign;
        }
    }
}
