use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::basis::FormBasis;
use super::index::{MultiIndex, MAX_DIM};
use crate::{Error, Result};

pub const DEFAULT_PRUNE_EPS: f64 = 1e-14;

/// A `p`-form on `R^n` with complex coefficients, stored sparsely.
#[derive(Clone, PartialEq)]
pub struct Form {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Form { dim, degree, coeffs: BTreeMap::new() }
    }

    /// The constant 0-form `c`.
    pub fn scalar(dim: usize, c: Complex64) -> Self {
        let mut f = Form::zero(dim, 0);
        f.add_term(MultiIndex::EMPTY, c);
        f
    }

    /// The basis form `e^I` for 0-based axes.
    pub fn basis(dim: usize, axes: &[usize]) -> Result<Self> {
        let idx = MultiIndex::new(axes)?;
        if idx.span() > dim {
            return Err(Error::InvalidIndex(format!("{idx} in dimension {dim}")));
        }
        let mut f = Form::zero(dim, axes.len());
        f.add_term(idx, Complex64::new(1.0, 0.0));
        Ok(f)
    }

    /// Real covector `sum_i u_i e^i`.
    pub fn covector(u: &[f64]) -> Self {
        let mut f = Form::zero(u.len(), 1);
        for (i, &c) in u.iter().enumerate() {
            f.add_term(MultiIndex::single(i), Complex64::new(c, 0.0));
        }
        f
    }

    pub fn from_terms(
        dim: usize,
        degree: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Complex64)>,
    ) -> Result<Self> {
        let mut f = Form::zero(dim, degree);
        for (idx, c) in terms {
            if idx.degree() != degree || idx.span() > dim {
                return Err(Error::InvalidIndex(format!(
                    "{idx} for a {degree}-form in dimension {dim}"
                )));
            }
            f.add_term(idx, c);
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, idx: MultiIndex) -> Complex64 {
        self.coeffs.get(&idx).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, Complex64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (*k, *v))
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Adds `c e^idx`; callers guarantee the index has the right degree.
    pub fn add_term(&mut self, idx: MultiIndex, c: Complex64) {
        debug_assert_eq!(idx.degree(), self.degree);
        if c == Complex64::default() {
            return;
        }
        let slot = self.coeffs.entry(idx).or_default();
        *slot += c;
        if *slot == Complex64::default() {
            self.coeffs.remove(&idx);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Euclidean coefficient norm `sqrt(sum |c_I|^2)`.
    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Hermitian coefficient inner product `sum conj(a_I) b_I`.
    pub fn inner(&self, other: &Form) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(k, a)| a.conj() * other.coeff(*k))
            .sum()
    }

    pub fn scale(&self, s: Complex64) -> Form {
        let mut out = Form::zero(self.dim, self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(*k, v * s);
        }
        out
    }

    pub fn scale_re(&self, s: f64) -> Form {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Form) -> Form {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: Complex64, other: &Form) -> Form {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree), "form shape mismatch");
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(*k, v * s);
        }
        out
    }

    pub fn add_assign_scaled(&mut self, s: Complex64, other: &Form) {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree), "form shape mismatch");
        for (k, v) in &other.coeffs {
            self.add_term(*k, v * s);
        }
    }

    pub fn conj(&self) -> Form {
        self.map(|c| c.conj())
    }

    pub fn re(&self) -> Form {
        self.map(|c| Complex64::new(c.re, 0.0))
    }

    pub fn im(&self) -> Form {
        self.map(|c| Complex64::new(c.im, 0.0))
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Form {
        let mut out = Form::zero(self.dim, self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(*k, f(*v));
        }
        out
    }

    /// A form is real when it is fixed by conjugation up to `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.values().all(|c| c.im.abs() <= tol)
    }

    /// Drops coefficients with magnitude below `eps`.
    pub fn prune(&self, eps: f64) -> Form {
        let mut out = self.clone();
        out.coeffs.retain(|_, c| c.norm() >= eps);
        out
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &Form) -> f64 {
        self.sub(other).max_abs()
    }

    /// The same coefficients viewed in a larger ambient dimension.
    pub fn embed(&self, dim: usize) -> Form {
        assert!(dim >= self.dim && dim <= MAX_DIM, "cannot embed into dimension {dim}");
        Form { dim, degree: self.degree, coeffs: self.coeffs.clone() }
    }

    /// Dense coefficient vector in the lexicographic basis.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let basis = FormBasis::get(self.dim, self.degree);
        let mut v = vec![Complex64::default(); basis.len()];
        for (k, c) in &self.coeffs {
            v[basis.position(*k).expect("index in basis")] = *c;
        }
        v
    }

    pub fn from_dense(dim: usize, degree: usize, v: &[Complex64]) -> Result<Form> {
        let basis = FormBasis::get(dim, degree);
        if v.len() != basis.len() {
            return Err(Error::DimMismatch(v.len(), basis.len()));
        }
        let mut f = Form::zero(dim, degree);
        for (i, c) in v.iter().enumerate() {
            f.add_term(basis.index(i), *c);
        }
        Ok(f)
    }

    pub fn from_dense_real(dim: usize, degree: usize, v: &[f64]) -> Result<Form> {
        let c: Vec<Complex64> = v.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        Form::from_dense(dim, degree, &c)
    }

    pub fn to_dense_real(&self) -> Vec<f64> {
        self.to_dense().into_iter().map(|c| c.re).collect()
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form(n={}, p={}; ", self.dim, self.degree)?;
        for (i, (k, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i) e[{k}]", c.re, c.im)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip() {
        let f = Form::from_terms(
            5,
            2,
            [
                (MultiIndex::new(&[0, 4]).unwrap(), Complex64::new(1.0, 2.0)),
                (MultiIndex::new(&[1, 2]).unwrap(), Complex64::new(-3.0, 0.0)),
            ],
        )
        .unwrap();
        let g = Form::from_dense(5, 2, &f.to_dense()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn cancellation_removes_entries() {
        let mut f = Form::basis(3, &[0]).unwrap();
        f.add_term(MultiIndex::single(0), Complex64::new(-1.0, 0.0));
        assert!(f.is_zero());
    }

    #[test]
    fn prune_bound() {
        let f = Form::from_terms(
            3,
            1,
            [
                (MultiIndex::single(0), Complex64::new(1e-16, 0.0)),
                (MultiIndex::single(1), Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        let g = f.prune(DEFAULT_PRUNE_EPS);
        assert_eq!(g.terms(), 1);
        assert!(f.distance(&g) <= DEFAULT_PRUNE_EPS * f.terms() as f64);
    }

    #[test]
    fn rejects_wrong_degree_terms() {
        assert!(Form::from_terms(3, 2, [(MultiIndex::single(0), Complex64::new(1.0, 0.0))]).is_err());
    }
}
