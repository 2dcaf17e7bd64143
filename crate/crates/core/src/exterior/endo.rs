use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// An element of `gl(V)`, column convention: `ξ e_j = Σ_i ξ[(i, j)] e_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Endo {
    m: DMatrix<f64>,
}

impl Endo {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimMismatch(m.nrows(), m.ncols()));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("endomorphism has non-finite entries".into()));
        }
        Ok(Endo { m })
    }

    pub fn zeros(n: usize) -> Self {
        Endo { m: DMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Endo { m: DMatrix::identity(n, n) }
    }

    /// Matrix unit `E_ij`, sending `e_j` to `e_i`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = 1.0;
        Endo { m }
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimMismatch(entries.len(), n * n));
        }
        Endo::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.m * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    pub fn compose(&self, other: &Endo) -> Endo {
        Endo { m: &self.m * &other.m }
    }

    /// `[self, other] = self∘other − other∘self`.
    pub fn commutator(&self, other: &Endo) -> Endo {
        Endo { m: &self.m * &other.m - &other.m * &self.m }
    }

    pub fn scale(&self, s: f64) -> Endo {
        Endo { m: &self.m * s }
    }

    pub fn add(&self, other: &Endo) -> Endo {
        Endo { m: &self.m + &other.m }
    }

    pub fn exp(&self) -> Endo {
        Endo { m: self.m.clone().exp() }
    }

    pub fn norm(&self) -> f64 {
        self.m.norm()
    }
}
