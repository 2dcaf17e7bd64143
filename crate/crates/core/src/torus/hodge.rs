//! Per-mode Hodge theory of the deformation complex `E⁰ → E¹ → E² → …` on a
//! flat torus. At mode `k` the differential is `2πi k∧` restricted to the
//! E-spaces, so everything reduces to small real matrices.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::field::{FourierField, Layout, TorusCtx};
use super::freq::Freq;
use super::ops::codifferential;
use crate::exterior::{binomial, TupleLayout};
use crate::model::{e_layout, e_space, wedge_matrix, CalibrationModel, G2Structure, ModelKind, Spin7Structure, K_MAX};
use crate::{Error, Result};

/// Laplacian eigenvalues below this fraction of the largest count as zero.
const SINGULAR_TOL: f64 = 1e-9;

#[derive(Debug)]
struct ModeInverse {
    /// Pseudo-inverse of `Δ_j(k)` in `E^j` coordinates.
    inverse: DMatrix<f64>,
    /// Projector onto `ker Δ_j(k)`, the `#`-harmonic fiber at this mode.
    kernel: DMatrix<f64>,
    condition: f64,
}

impl ModeInverse {
    fn singular(&self) -> bool {
        self.kernel.nrows() > 0 && self.kernel.trace() > 0.5
    }
}

/// Symbols, Laplacians and Green operators of the `#` complex of one model.
#[derive(Debug)]
pub struct HodgePackage {
    model: CalibrationModel,
    /// Orthonormal bases `Q_j` of `E^j`, `j = 0..=K_MAX`.
    bases: Vec<DMatrix<f64>>,
    layouts: Vec<TupleLayout>,
    cache: Mutex<HashMap<(usize, Freq), Arc<ModeInverse>>>,
}

impl HodgePackage {
    pub fn new(model: &CalibrationModel) -> Result<Self> {
        let mut bases = Vec::new();
        let mut layouts = Vec::new();
        for j in 0..=K_MAX {
            bases.push(e_space(model, j)?.basis().clone());
            layouts.push(e_layout(model, j));
        }
        Ok(HodgePackage { model: model.clone(), bases, layouts, cache: Mutex::new(HashMap::new()) })
    }

    pub fn model(&self) -> &CalibrationModel {
        &self.model
    }

    /// Highest degree with a Laplacian (needs `E^{j+1}`).
    pub fn top_degree(&self) -> usize {
        K_MAX - 1
    }

    pub fn rank(&self, j: usize) -> usize {
        self.bases[j].ncols()
    }

    pub fn layout(&self, j: usize) -> &TupleLayout {
        &self.layouts[j]
    }

    pub fn field_layout(&self, j: usize) -> Layout {
        Layout::Forms(self.layouts[j].clone())
    }

    fn check_degree(&self, j: usize) -> Result<()> {
        if j > self.top_degree() {
            return Err(Error::Precondition(format!("# Laplacian on E^{j} needs E^{}", j + 1)));
        }
        Ok(())
    }

    /// `S_j(k) = Q_{j+1}ᵀ (k∧) Q_j`; the symbol of `d` is `2πi S_j(k)`.
    pub fn symbol(&self, j: usize, k: &Freq) -> DMatrix<f64> {
        let w = wedge_matrix(&k.as_f64(), &self.layouts[j]);
        self.bases[j + 1].transpose() * w * &self.bases[j]
    }

    /// `Δ_j(k) = (2π)² (S_jᵀS_j + S_{j−1}S_{j−1}ᵀ)` in `E^j` coordinates.
    pub fn laplacian_matrix(&self, j: usize, k: &Freq) -> Result<DMatrix<f64>> {
        self.check_degree(j)?;
        let s = self.symbol(j, k);
        let mut l = s.transpose() * s;
        if j > 0 {
            let s = self.symbol(j - 1, k);
            l += &s * s.transpose();
        }
        Ok(l * (TAU * TAU))
    }

    fn mode_inverse(&self, j: usize, k: &Freq) -> Result<Arc<ModeInverse>> {
        let key = (j, k.clone());
        if let Some(m) = self.cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(m.clone());
        }
        let l = self.laplacian_matrix(j, k)?;
        let size = l.nrows();
        let inv = if size == 0 {
            ModeInverse { inverse: l.clone(), kernel: l, condition: 1.0 }
        } else {
            let eig = SymmetricEigen::new(l);
            let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
            let mut inverse = DMatrix::zeros(size, size);
            let mut kernel = DMatrix::zeros(size, size);
            let mut min = f64::INFINITY;
            for (i, &x) in eig.eigenvalues.iter().enumerate() {
                let v = eig.eigenvectors.column(i);
                if x <= SINGULAR_TOL * max {
                    kernel += v * v.transpose();
                } else {
                    inverse += (v * v.transpose()) / x;
                    min = min.min(x);
                }
            }
            let condition = if kernel.trace() > 0.5 { f64::INFINITY } else { max / min };
            ModeInverse { inverse, kernel, condition }
        };
        let inv = Arc::new(inv);
        self.cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, inv.clone());
        Ok(inv)
    }

    /// Condition number of `Δ_j(k)`, infinite if singular.
    pub fn condition_number(&self, j: usize, k: &Freq) -> Result<f64> {
        Ok(self.mode_inverse(j, k)?.condition)
    }

    /// Whether `Δ_j(k)` is invertible.
    pub fn is_elliptic_at(&self, j: usize, k: &Freq) -> Result<bool> {
        Ok(!self.mode_inverse(j, k)?.singular())
    }

    /// Largest entry of `S_{j+1}(k) S_j(k)`.
    pub fn symbol_square_defect(&self, j: usize, k: &Freq) -> f64 {
        (self.symbol(j + 1, k) * self.symbol(j, k)).amax()
    }

    fn apply_real(m: &DMatrix<f64>, c: &[Complex64]) -> Vec<Complex64> {
        let re = m * DVector::from_iterator(c.len(), c.iter().map(|z| z.re));
        let im = m * DVector::from_iterator(c.len(), c.iter().map(|z| z.im));
        re.iter().zip(im.iter()).map(|(a, b)| Complex64::new(*a, *b)).collect()
    }

    fn check_field(&self, j: usize, f: &FourierField) -> Result<()> {
        let residual = self.subspace_residual(j, f)?;
        if residual > 1e-9 {
            return Err(Error::NotInSubspace { degree: j, residual });
        }
        Ok(())
    }

    /// Orthogonal projection of every mode onto `E^j`.
    pub fn project(&self, j: usize, f: &FourierField) -> Result<FourierField> {
        if f.layout != self.field_layout(j) {
            return Err(Error::Layout(format!("expected E^{j} layout, got {:?}", f.layout)));
        }
        let p = &self.bases[j] * self.bases[j].transpose();
        Ok(f.map_modes(|_, c| Self::apply_real(&p, c)))
    }

    /// Largest distance of a mode coefficient from `E^j`, relative to the
    /// largest mode coefficient of `f` (so cancellation noise in tiny modes
    /// does not count).
    pub fn subspace_residual(&self, j: usize, f: &FourierField) -> Result<f64> {
        let p = self.project(j, f)?;
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for (k, c) in f.modes() {
            let pc = p.mode(k).map(<[Complex64]>::to_vec).unwrap_or_else(|| vec![Complex64::default(); c.len()]);
            scale = scale.max(c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
            worst = worst.max(pc.iter().zip(c).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt());
        }
        Ok(if scale > 0.0 { worst / scale } else { 0.0 })
    }

    /// `Δ_#` applied mode by mode.
    pub fn laplacian_sharp(&self, j: usize, f: &FourierField) -> Result<FourierField> {
        self.check_field(j, f)?;
        let q = &self.bases[j];
        let mut out = FourierField::zero(f.ctx, f.layout.clone());
        for (k, c) in f.modes() {
            let m = q * self.laplacian_matrix(j, k)? * q.transpose();
            out.put(k.clone(), Self::apply_real(&m, c));
        }
        Ok(out)
    }

    /// `G_#`: inverse `#` Laplacian on nonzero modes; mode 0 is annihilated.
    pub fn green_sharp(&self, j: usize, f: &FourierField) -> Result<FourierField> {
        self.check_field(j, f)?;
        let q = &self.bases[j];
        let mut out = FourierField::zero(f.ctx, f.layout.clone());
        for (k, c) in f.modes() {
            if k.is_zero() {
                continue;
            }
            let inv = self.mode_inverse(j, k)?;
            if inv.singular() {
                return Err(Error::NotElliptic { degree: j, mode: k.to_string() });
            }
            let m = q * &inv.inverse * q.transpose();
            out.put(k.clone(), Self::apply_real(&m, c));
        }
        Ok(out)
    }

    /// `#`-harmonic part: the `E^j` projection of the mode-0 coefficient plus,
    /// at nonzero modes, the projection onto `ker Δ_j(k)` (empty when the
    /// model is elliptic).
    pub fn harmonic_part(&self, j: usize, f: &FourierField) -> Result<FourierField> {
        let f = self.project(j, f)?;
        let q = &self.bases[j];
        let mut out = FourierField::zero(f.ctx, f.layout.clone());
        for (k, c) in f.modes() {
            if k.is_zero() {
                out.put(k.clone(), c.to_vec());
                continue;
            }
            let inv = self.mode_inverse(j, k)?;
            if inv.singular() {
                let m = q * &inv.kernel * q.transpose();
                out.put(k.clone(), Self::apply_real(&m, c));
            }
        }
        Ok(out)
    }

    /// `d_{j−1}^* = π_{E^{j−1}} ∘ d*` on `E^j`-valued fields.
    pub fn d_sharp_adjoint(&self, j: usize, f: &FourierField) -> Result<FourierField> {
        if j == 0 {
            return Err(Error::Precondition("no adjoint below E^0".into()));
        }
        self.project(j - 1, &codifferential(f)?)
    }
}

/// `dim H^j(#)` on a torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CohomologyDim {
    Finite(usize),
    /// Some nonzero mode carries kernel, so the complex is not elliptic there.
    Infinite,
}

impl std::fmt::Display for CohomologyDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CohomologyDim::Finite(d) => write!(f, "{d}"),
            CohomologyDim::Infinite => f.write_str("inf"),
        }
    }
}

/// `dim H^j(#)` for `j ≤ j_max` from per-mode kernels: every nonzero mode with
/// `|k|∞ ≤ 1` is checked for exactness and mode 0 contributes `dim E^j`.
/// Modes `k` and `−k` share a Laplacian, so only one of each pair is solved.
pub fn cohomology_dims(pkg: &HodgePackage, j_max: usize) -> Result<Vec<CohomologyDim>> {
    let n = pkg.model.dim();
    let modes: Vec<Freq> = Freq::ball(n, 1).into_iter().filter(|k| *k > Freq::zero(n)).collect();
    let mut out = Vec::new();
    for j in 0..=j_max.min(pkg.top_degree()) {
        let mut finite = true;
        for k in &modes {
            if pkg.mode_inverse(j, k)?.singular() {
                finite = false;
                break;
            }
        }
        out.push(if finite { CohomologyDim::Finite(pkg.rank(j)) } else { CohomologyDim::Infinite });
    }
    // The per-mode cache holds thousands of modes now; deformation runs only need a few.
    pkg.cache.lock().unwrap_or_else(|e| e.into_inner()).clear();
    Ok(out)
}

/// `dim H^j(#)` on the torus from its identification with de Rham and Dolbeault
/// data (torus Betti and Hodge numbers plus representation dimensions),
/// computed without the E-spaces. `None` where no identification is known.
pub fn cohomology_formula(model: &CalibrationModel, j: usize) -> Result<Option<usize>> {
    Ok(match (model.kind(), j) {
        (ModelKind::Symplectic { n }, j) => Some(binomial(2 * n, j + 1)),
        (ModelKind::CalabiYau { n }, 1) => {
            // H^{n,0} ⊕ H^{n−1,1} (real dimension) ⊕ P^{1,1}_R.
            let h = |p: usize, q: usize| binomial(n, p) * binomial(n, q);
            Some(2 * (h(n, 0) + h(n - 1, 1)) + h(1, 1) - 1)
        }
        (ModelKind::HyperKahler { m }, 1) => Some(14 * m * m - m),
        (ModelKind::G2, 1) => Some(binomial(7, 3)),
        (ModelKind::G2, 2) => {
            // H^4 ⊕ H^5_14.
            let g = G2Structure::new(model)?;
            Some(binomial(7, 4) + g.lambda5_14()?.trace().round() as usize)
        }
        (ModelKind::Spin7, 1) => {
            // b^4_1 + b^4_7 + b^4_35.
            let r = Spin7Structure::new(model)?.ranks();
            Some(r[2][0] + r[2][1] + r[2][3])
        }
        (ModelKind::Spin7, 2) => Some(binomial(8, 5)),
        _ => None,
    })
}

/// Torus context matching a model's dimension.
pub fn torus_for(model: &CalibrationModel) -> TorusCtx {
    TorusCtx::new(model.dim())
}
