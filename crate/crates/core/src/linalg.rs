//! Numerical rank, orthonormal bases and subspaces.
//!
//! Ranks use a singular-value cutoff relative to the largest singular value.
//! An integer rank is only reported when it is unchanged with the cutoff
//! scaled by 10 in either direction.

use nalgebra::{DMatrix, DVector};

use crate::exterior::{FormTuple, TupleLayout};
use crate::{Error, Result};

pub const RANK_TOL: f64 = 1e-9;

/// Symmetric eigendecomposition `(eigenvalues, eigenvectors)`.
///
/// nalgebra's implicit QR iteration occasionally returns NaN on sparse
/// arrowhead matrices, depending on the optimization level. The same matrix
/// under a symmetric permutation converges, so orderings are retried until
/// every entry is finite.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    for shift in 0..n.max(1) {
        for reverse in [false, true] {
            let p: Vec<usize> = (0..n)
                .map(|i| {
                    let j = (i + shift) % n;
                    if reverse { n - 1 - j } else { j }
                })
                .collect();
            let pm = DMatrix::from_fn(n, n, |i, j| m[(p[i], p[j])]);
            let eig = pm.symmetric_eigen();
            if eig.eigenvalues.iter().chain(eig.eigenvectors.iter()).all(|x| x.is_finite()) {
                let mut vecs = DMatrix::zeros(n, n);
                for (i, &pi) in p.iter().enumerate() {
                    vecs.row_mut(pi).copy_from(&eig.eigenvectors.row(i));
                }
                return (eig.eigenvalues, vecs);
            }
        }
    }
    panic!("symmetric eigensolver did not converge on a {n}x{n} matrix");
}

/// Singular values and left singular vectors from the symmetric eigenproblem
/// of `[[0, A], [Aᵀ, 0]]`, whose eigenvalues are `±σ_i` padded with zeros.
///
/// nalgebra's bidiagonal SVD can return an inaccurate `U` on exactly
/// structured sparse matrices such as wedge operators; the symmetric
/// eigensolver does not, and keeps the same absolute accuracy.
fn augmented_svd(m: &DMatrix<f64>, want_u: bool) -> (Vec<f64>, Vec<DVector<f64>>) {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut jw = DMatrix::zeros(r + c, r + c);
    jw.view_mut((0, r), (r, c)).copy_from(m);
    jw.view_mut((r, 0), (c, r)).copy_from(&m.transpose());
    let (values, vectors) = symmetric_eigen(&jw);
    let mut order: Vec<usize> = (0..r + c).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let sigma: Vec<f64> = order[..k].iter().map(|&i| values[i].max(0.0)).collect();
    let u = if want_u {
        order[..k]
            .iter()
            .map(|&i| vectors.view((0, i), (r, 1)).into_owned().column(0) * std::f64::consts::SQRT_2)
            .collect()
    } else {
        Vec::new()
    };
    (sigma, u)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    augmented_svd(m, false).0
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

fn rank_from_sv(s: &[f64], rel_tol: f64) -> usize {
    match s.first() {
        Some(&max) if max > 0.0 => s.iter().filter(|&&x| x > rel_tol * max).count(),
        _ => 0,
    }
}

/// Rank at a single relative cutoff.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    rank_from_sv(&singular_values(m), rel_tol)
}

/// Rank that must agree at `rel_tol / 10`, `rel_tol` and `10 rel_tol`.
pub fn stable_rank(m: &DMatrix<f64>, rel_tol: f64) -> Result<usize> {
    rank_checked(&singular_values(m), rel_tol)
}

fn rank_checked(s: &[f64], rel_tol: f64) -> Result<usize> {
    let cutoffs = [rel_tol / 10.0, rel_tol, rel_tol * 10.0];
    let ranks = cutoffs.map(|c| rank_from_sv(s, c));
    if ranks[0] != ranks[1] || ranks[1] != ranks[2] {
        return Err(Error::RankUnstable { ranks, cutoffs });
    }
    Ok(ranks[1])
}

/// Orthonormal basis of the column space, as columns.
pub fn column_space(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return Ok(DMatrix::zeros(rows, 0));
    }
    let (sigma, u) = augmented_svd(m, true);
    let r = rank_checked(&sigma, rel_tol)?;
    if r == 0 {
        return Ok(DMatrix::zeros(rows, 0));
    }
    // Re-orthonormalize to remove the roundoff of the eigenvector split.
    Ok(DMatrix::from_columns(&u[..r]).qr().q())
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns `q` inside `R^rows`.
pub fn complement_of_orthonormal(q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = q.nrows();
    if q.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    if q.ncols() >= n {
        return DMatrix::zeros(n, 0);
    }
    let p = DMatrix::identity(n, n) - q * q.transpose();
    let (values, vectors) = symmetric_eigen(&p);
    let mut idx: Vec<usize> = (0..n).filter(|&i| values[i] > 0.5).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let cols: Vec<DVector<f64>> = idx.iter().map(|&i| vectors.column(i).into_owned()).collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the kernel of `m`, as columns.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    let row_space = column_space(&m.transpose(), rel_tol)?;
    Ok(complement_of_orthonormal(&row_space))
}

/// Moore-Penrose pseudo-inverse from the eigen decomposition of `AᵀA`, with
/// singular values below `rel_tol · σ_max` treated as zero. Squaring limits
/// the resolution, so cutoffs below `1e−6` are raised to it. Also returns the
/// smallest retained singular value.
pub fn pseudo_inverse(m: &DMatrix<f64>, rel_tol: f64) -> (DMatrix<f64>, f64) {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return (DMatrix::zeros(c, r), 0.0);
    }
    let (values, vectors) = symmetric_eigen(&(m.transpose() * m));
    let max = values.iter().cloned().fold(0.0, f64::max);
    let cut = (rel_tol.max(1e-6) * max.sqrt()).powi(2);
    let mut inv = DMatrix::zeros(c, c);
    let mut smallest = f64::INFINITY;
    for (i, &lambda) in values.iter().enumerate() {
        if lambda > cut && lambda > 0.0 {
            let v = vectors.column(i);
            inv += (v * v.transpose()) / lambda;
            smallest = smallest.min(lambda.sqrt());
        }
    }
    (inv * m.transpose(), if smallest.is_finite() { smallest } else { 0.0 })
}

/// What the coordinates of a subspace describe.
#[derive(Clone, Debug, PartialEq)]
pub enum Ambient {
    /// Dense real coordinates of a form tuple.
    Forms(TupleLayout),
    /// `gl(n)` flattened row-major.
    Endo(usize),
    Raw(usize),
}

impl Ambient {
    pub fn len(&self) -> usize {
        match self {
            Ambient::Forms(l) => l.len(),
            Ambient::Endo(n) => n * n,
            Ambient::Raw(d) => *d,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A real linear subspace, held as an orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: Ambient,
    q: DMatrix<f64>,
}

impl Subspace {
    /// Span of the columns of `generators`.
    pub fn from_generators(ambient: Ambient, generators: &DMatrix<f64>) -> Result<Self> {
        if generators.nrows() != ambient.len() {
            return Err(Error::DimMismatch(generators.nrows(), ambient.len()));
        }
        Ok(Subspace { q: column_space(generators, RANK_TOL)?, ambient })
    }

    pub fn from_vectors(ambient: Ambient, vectors: &[Vec<f64>]) -> Result<Self> {
        let d = ambient.len();
        let m = DMatrix::from_fn(d, vectors.len(), |i, j| vectors[j][i]);
        Subspace::from_generators(ambient, &m)
    }

    pub fn from_tuples(layout: &TupleLayout, tuples: &[FormTuple]) -> Result<Self> {
        let vs = tuples.iter().map(|t| layout.to_real_vec(t)).collect::<Result<Vec<_>>>()?;
        Subspace::from_vectors(Ambient::Forms(layout.clone()), &vs)
    }

    /// Caller guarantees orthonormal columns.
    pub fn from_orthonormal(ambient: Ambient, q: DMatrix<f64>) -> Self {
        debug_assert_eq!(q.nrows(), ambient.len());
        Subspace { ambient, q }
    }

    pub fn full(ambient: Ambient) -> Self {
        let d = ambient.len();
        Subspace { ambient, q: DMatrix::identity(d, d) }
    }

    pub fn zero(ambient: Ambient) -> Self {
        let d = ambient.len();
        Subspace { ambient, q: DMatrix::zeros(d, 0) }
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    /// Orthonormal basis as columns.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Orthonormal basis as form tuples; `None` for non-form ambients.
    pub fn tuples(&self) -> Option<Vec<FormTuple>> {
        match &self.ambient {
            Ambient::Forms(l) => Some(
                self.q
                    .column_iter()
                    .map(|c| l.from_real_vec(c.as_slice()).expect("layout length"))
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.q * self.q.transpose()
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.q * (self.q.transpose() * v)
    }

    /// `‖v − P v‖`.
    pub fn residual(&self, v: &DVector<f64>) -> f64 {
        (v - self.project(v)).norm()
    }

    /// `‖v − P v‖ / ‖v‖`, zero for the zero vector.
    pub fn relative_residual(&self, v: &DVector<f64>) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            0.0
        } else {
            self.residual(v) / n
        }
    }

    /// Largest residual of either basis projected onto the other span.
    pub fn distance(&self, other: &Subspace) -> f64 {
        if self.rank() != other.rank() {
            return f64::INFINITY;
        }
        let a = (&self.q - other.projector() * &self.q).norm();
        let b = (&other.q - self.projector() * &other.q).norm();
        a.max(b)
    }

    pub fn complement(&self) -> Subspace {
        Subspace { ambient: self.ambient.clone(), q: complement_of_orthonormal(&self.q) }
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        let m = DMatrix::from_fn(self.q.nrows(), self.rank() + other.rank(), |i, j| {
            if j < self.rank() {
                self.q[(i, j)]
            } else {
                other.q[(i, j - self.rank())]
            }
        });
        Subspace::from_generators(self.ambient.clone(), &m)
    }

    /// `self ∩ other^⊥`, the orthogonal complement of `other` inside `self`.
    pub fn minus(&self, other: &Subspace) -> Result<Subspace> {
        let m = &self.q - other.projector() * &self.q;
        if self.rank() == 0 {
            return Ok(self.clone());
        }
        Subspace::from_generators(self.ambient.clone(), &m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn eigen_of_sparse_arrowhead_reconstructs() {
        // A single column of ±1 entries in a zero block, like one form as a span.
        let n = 71;
        let mut m = DMatrix::zeros(n, n);
        for i in (0..n - 1).step_by(5) {
            let v = if i % 2 == 0 { 1.0 } else { -1.0 };
            m[(i, n - 1)] = v;
            m[(n - 1, i)] = v;
        }
        let (values, vectors) = symmetric_eigen(&m);
        let back = &vectors * DMatrix::from_diagonal(&values) * vectors.transpose();
        assert!((back - &m).abs().max() < 1e-12);
        assert_eq!(stable_rank(&m.columns(n - 1, 1).into_owned(), RANK_TOL).unwrap(), 1);
    }

    #[test]
    fn rank_of_low_rank_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random(&mut rng, 10, 3) * random(&mut rng, 3, 15);
        assert_eq!(stable_rank(&m, RANK_TOL).unwrap(), 3);
        assert_eq!(numerical_rank(&m.transpose(), RANK_TOL), 3);
    }

    #[test]
    fn unstable_rank_is_an_error() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-9]));
        assert!(matches!(stable_rank(&m, RANK_TOL), Err(Error::RankUnstable { .. })));
    }

    #[test]
    fn null_space_is_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random(&mut rng, 4, 3) * random(&mut rng, 3, 9);
        let k = null_space(&m, RANK_TOL).unwrap();
        assert_eq!(k.ncols(), 6);
        assert!((&m * &k).norm() < 1e-12);
        assert!((k.transpose() * &k - DMatrix::identity(6, 6)).norm() < 1e-12);
    }

    #[test]
    fn spans_agree_across_generating_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random(&mut rng, 8, 3);
        let mix = random(&mut rng, 3, 5);
        let a = Subspace::from_generators(Ambient::Raw(8), &g).unwrap();
        let b = Subspace::from_generators(Ambient::Raw(8), &(&g * mix)).unwrap();
        assert!(a.distance(&b) < 1e-9);
        let c = a.complement();
        assert_eq!(c.rank(), 5);
        assert!((a.basis().transpose() * c.basis()).norm() < 1e-12);
        let s = a.sum(&c).unwrap();
        assert_eq!(s.rank(), 8);
        assert_eq!(s.minus(&a).unwrap().distance(&c) < 1e-9, true);
    }
}
