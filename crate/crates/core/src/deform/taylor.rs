use crate::torus::{rho_hat_field, FourierField};
use crate::Result;

/// Taylor coefficients of `ρ̂_{a(t)}^m Φ⁰` for `a(t) = Σ_i α_i t^i`,
/// `α_i = a_i / i!`: `p[m][k] = Σ_{i≥1} ρ̂_{α_i} p[m−1][k−i]`.
#[derive(Clone, Debug)]
pub struct TaylorTable {
    phi: FourierField,
    /// `alphas[i − 1] = α_i`.
    alphas: Vec<FourierField>,
    /// `p[m][k]` for `m ≤ k`, `k ≤` the highest order touched so far.
    p: Vec<Vec<Option<FourierField>>>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl TaylorTable {
    pub fn new(phi: FourierField) -> Self {
        TaylorTable { phi, alphas: Vec::new(), p: vec![vec![None]] }
    }

    pub fn phi(&self) -> &FourierField {
        &self.phi
    }

    /// Number of coefficients `a_i` set so far.
    pub fn order(&self) -> usize {
        self.alphas.len()
    }

    pub fn alpha(&self, i: usize) -> &FourierField {
        &self.alphas[i - 1]
    }

    /// `a_i = i! α_i`.
    pub fn coefficient(&self, i: usize) -> FourierField {
        self.alphas[i - 1].scale_re(factorial(i))
    }

    fn ensure(&mut self, k: usize) {
        let width = (k + 1).max(self.p[0].len());
        for row in &mut self.p {
            row.resize(width, None);
        }
        while self.p.len() < width {
            self.p.push(vec![None; width]);
        }
    }

    fn zero(&self) -> FourierField {
        FourierField::zero(self.phi.ctx, self.phi.layout.clone())
    }

    /// `p[m][k]`, computing it if needed from `α_1..α_{k−1}` (`m ≥ 2`) or
    /// `α_k` (`m = 1`).
    pub fn term(&mut self, m: usize, k: usize) -> Result<FourierField> {
        if m == 0 {
            return Ok(if k == 0 { self.phi.clone() } else { self.zero() });
        }
        if m > k {
            return Ok(self.zero());
        }
        self.ensure(k);
        if let Some(f) = &self.p[m][k] {
            return Ok(f.clone());
        }
        let mut acc = self.zero();
        for i in 1..=(k - m + 1).min(self.alphas.len()) {
            let prev = self.term(m - 1, k - i)?;
            if prev.is_zero() || self.alphas[i - 1].is_zero() {
                continue;
            }
            acc = acc.add(&rho_hat_field(&self.alphas[i - 1], &prev)?)?;
        }
        self.p[m][k] = Some(acc.clone());
        Ok(acc)
    }

    /// Records `a_k`; orders must be appended in sequence.
    pub fn push(&mut self, a_k: &FourierField) {
        let k = self.alphas.len() + 1;
        self.alphas.push(a_k.scale_re(1.0 / factorial(k)));
        // Cached terms at order k were computed without α_k.
        if self.p.len() > 1 && self.p[1].len() > k {
            self.p[1][k] = None;
        }
    }

    /// Order-`k` coefficient of `ρ_{exp a(t)}Φ⁰ = Σ_m ρ̂_{a(t)}^m Φ⁰ / m!`,
    /// restricted to `m ≥ m_min`.
    pub fn coefficient_of_exp(&mut self, k: usize, m_min: usize) -> Result<FourierField> {
        let mut acc = self.zero();
        for m in m_min..=k {
            let t = self.term(m, k)?;
            if !t.is_zero() {
                acc = acc.add(&t.scale_re(1.0 / factorial(m)))?;
            }
        }
        Ok(acc)
    }
}
