use num_complex::Complex64;

use super::basis::FormBasis;
use super::endo::Endo;
use super::form::Form;
use super::ops;
use crate::{Error, Result};

/// A tuple of forms `(φ_1, ..., φ_l)` on a common space.
#[derive(Clone, Debug, PartialEq)]
pub struct FormTuple {
    parts: Vec<Form>,
}

impl FormTuple {
    pub fn new(parts: Vec<Form>) -> Result<Self> {
        if let Some(first) = parts.first() {
            if let Some(bad) = parts.iter().find(|p| p.dim() != first.dim()) {
                return Err(Error::DimMismatch(first.dim(), bad.dim()));
            }
        }
        Ok(FormTuple { parts })
    }

    pub fn zero(layout: &TupleLayout) -> Self {
        FormTuple {
            parts: layout.degrees.iter().map(|&p| Form::zero(layout.dim, p)).collect(),
        }
    }

    pub fn parts(&self) -> &[Form] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Form> {
        self.parts
    }

    pub fn dim(&self) -> usize {
        self.parts.first().map_or(0, Form::dim)
    }

    pub fn signature(&self) -> Vec<usize> {
        self.parts.iter().map(Form::degree).collect()
    }

    pub fn layout(&self) -> TupleLayout {
        TupleLayout::new(self.dim(), self.signature())
    }

    pub fn map(&self, f: impl Fn(&Form) -> Form) -> FormTuple {
        FormTuple { parts: self.parts.iter().map(f).collect() }
    }

    pub fn zip(&self, other: &FormTuple, f: impl Fn(&Form, &Form) -> Form) -> FormTuple {
        assert_eq!(self.signature(), other.signature(), "tuple signature mismatch");
        FormTuple {
            parts: self.parts.iter().zip(&other.parts).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &FormTuple) -> FormTuple {
        self.zip(other, Form::add)
    }

    pub fn sub(&self, other: &FormTuple) -> FormTuple {
        self.zip(other, Form::sub)
    }

    pub fn scale(&self, s: Complex64) -> FormTuple {
        self.map(|f| f.scale(s))
    }

    pub fn rho_hat(&self, xi: &Endo) -> FormTuple {
        self.map(|f| ops::rho_hat(xi, f))
    }

    pub fn interior(&self, v: &[f64]) -> FormTuple {
        self.map(|f| ops::interior(v, f))
    }

    pub fn wedge_left(&self, beta: &Form) -> FormTuple {
        self.map(|f| ops::wedge(beta, f))
    }

    pub fn pullback(&self, g: &Endo) -> Result<FormTuple> {
        Ok(FormTuple {
            parts: self.parts.iter().map(|f| ops::pullback(g, f)).collect::<Result<_>>()?,
        })
    }

    pub fn norm(&self) -> f64 {
        self.parts.iter().map(|f| f.norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &FormTuple) -> f64 {
        self.sub(other).parts.iter().map(Form::max_abs).fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.parts.iter().all(|f| f.is_real(tol))
    }
}

/// Shape of a form tuple: ambient dimension and degree signature. Provides
/// the dense coordinates used for all linear algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TupleLayout {
    pub dim: usize,
    pub degrees: Vec<usize>,
}

impl TupleLayout {
    pub fn new(dim: usize, degrees: Vec<usize>) -> Self {
        TupleLayout { dim, degrees }
    }

    /// Every degree shifted by `k`; degrees above `dim` give empty blocks.
    pub fn shifted(&self, k: isize) -> TupleLayout {
        TupleLayout {
            dim: self.dim,
            degrees: self.degrees.iter().map(|&p| (p as isize + k).max(0) as usize).collect(),
        }
    }

    pub fn block_len(&self, i: usize) -> usize {
        FormBasis::get(self.dim, self.degrees[i]).len()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degrees.len() + 1);
        let mut acc = 0;
        out.push(0);
        for i in 0..self.degrees.len() {
            acc += self.block_len(i);
            out.push(acc);
        }
        out
    }

    pub fn len(&self) -> usize {
        (0..self.degrees.len()).map(|i| self.block_len(i)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self, t: &FormTuple) -> Result<()> {
        if t.signature() != self.degrees || (!t.parts.is_empty() && t.dim() != self.dim) {
            return Err(Error::Layout(format!(
                "tuple {:?} in dimension {} does not fit layout {:?} in dimension {}",
                t.signature(),
                t.dim(),
                self.degrees,
                self.dim
            )));
        }
        Ok(())
    }

    pub fn to_complex_vec(&self, t: &FormTuple) -> Result<Vec<Complex64>> {
        self.check(t)?;
        Ok(t.parts.iter().flat_map(Form::to_dense).collect())
    }

    /// Real parts of the dense coordinates.
    pub fn to_real_vec(&self, t: &FormTuple) -> Result<Vec<f64>> {
        Ok(self.to_complex_vec(t)?.into_iter().map(|c| c.re).collect())
    }

    pub fn from_complex_vec(&self, v: &[Complex64]) -> Result<FormTuple> {
        if v.len() != self.len() {
            return Err(Error::DimMismatch(v.len(), self.len()));
        }
        let off = self.offsets();
        let parts = self
            .degrees
            .iter()
            .enumerate()
            .map(|(i, &p)| Form::from_dense(self.dim, p, &v[off[i]..off[i + 1]]))
            .collect::<Result<_>>()?;
        FormTuple::new(parts)
    }

    pub fn from_real_vec(&self, v: &[f64]) -> Result<FormTuple> {
        let c: Vec<Complex64> = v.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        self.from_complex_vec(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_round_trip() {
        let t = FormTuple::new(vec![
            Form::basis(4, &[0, 1]).unwrap(),
            Form::basis(4, &[1, 2, 3]).unwrap().scale_re(-2.0),
        ])
        .unwrap();
        let l = t.layout();
        assert_eq!(l.len(), 6 + 4);
        let v = l.to_real_vec(&t).unwrap();
        assert_eq!(l.from_real_vec(&v).unwrap(), t);
        assert_eq!(l.shifted(2).degrees, vec![4, 5]);
        assert_eq!(l.shifted(2).len(), 1);
    }

    #[test]
    fn mixed_dims_rejected() {
        assert!(FormTuple::new(vec![Form::zero(3, 1), Form::zero(4, 1)]).is_err());
    }
}
