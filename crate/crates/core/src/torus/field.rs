use std::collections::BTreeMap;

use num_complex::Complex64;

use super::freq::Freq;
use crate::exterior::{FormTuple, TupleLayout};
use crate::{Error, Result};

/// Torus `T^n = R^n / Z^n` with a hard bound on the frequency support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusCtx {
    pub n: usize,
    /// Largest allowed `|k|∞`.
    pub cap: i32,
}

pub const DEFAULT_CAP: i32 = 64;

impl TorusCtx {
    pub fn new(n: usize) -> Self {
        TorusCtx { n, cap: DEFAULT_CAP }
    }

    pub fn with_cap(n: usize, cap: i32) -> Self {
        TorusCtx { n, cap }
    }
}

/// What each Fourier coefficient holds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Layout {
    /// Form tuple coordinates. `Λ²⊗T` uses `n` blocks of degree 2, block `j`
    /// holding the 2-form `K^j`.
    Forms(TupleLayout),
    /// `gl(n)` row-major, `ξ_jm` at `j n + m`.
    Endo(usize),
    Vector(usize),
}

impl Layout {
    pub fn forms(n: usize, degrees: Vec<usize>) -> Self {
        Layout::Forms(TupleLayout::new(n, degrees))
    }

    pub fn tensor(n: usize) -> Self {
        Layout::forms(n, vec![2; n])
    }

    pub fn len(&self) -> usize {
        match self {
            Layout::Forms(t) => t.len(),
            Layout::Endo(n) => n * n,
            Layout::Vector(n) => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn tuple(&self) -> Result<&TupleLayout> {
        match self {
            Layout::Forms(t) => Ok(t),
            other => Err(Error::Layout(format!("expected form-valued field, got {other:?}"))),
        }
    }
}

/// A trigonometric polynomial `f(x) = Σ_k c_k e^{2πi k·x}` with coefficients
/// in a fixed layout.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    pub ctx: TorusCtx,
    pub layout: Layout,
    modes: BTreeMap<Freq, Vec<Complex64>>,
}

impl FourierField {
    pub fn zero(ctx: TorusCtx, layout: Layout) -> Self {
        FourierField { ctx, layout, modes: BTreeMap::new() }
    }

    pub fn constant(ctx: TorusCtx, layout: Layout, c: Vec<Complex64>) -> Result<Self> {
        let mut f = FourierField::zero(ctx, layout);
        f.add_mode(&Freq::zero(ctx.n), &c, "constant")?;
        Ok(f)
    }

    pub fn single(ctx: TorusCtx, layout: Layout, k: Freq, c: Vec<Complex64>) -> Result<Self> {
        let mut f = FourierField::zero(ctx, layout);
        f.add_mode(&k, &c, "single mode")?;
        Ok(f)
    }

    /// Constant field with the value of a form tuple.
    pub fn from_tuple(ctx: TorusCtx, t: &FormTuple) -> Result<Self> {
        let l = t.layout();
        let v = l.to_complex_vec(t)?;
        FourierField::constant(ctx, Layout::Forms(l), v)
    }

    pub fn check_cap(&self, k: &Freq, context: &str) -> Result<()> {
        if k.dim() != self.ctx.n {
            return Err(Error::DimMismatch(k.dim(), self.ctx.n));
        }
        if k.sup_norm() > self.ctx.cap {
            return Err(Error::SupportCap { cap: self.ctx.cap, freq: k.to_string(), context: context.into() });
        }
        Ok(())
    }

    /// Adds `c` to the coefficient at `k`.
    pub fn add_mode(&mut self, k: &Freq, c: &[Complex64], context: &str) -> Result<()> {
        if c.len() != self.layout.len() {
            return Err(Error::Layout(format!("payload of length {} for {:?}", c.len(), self.layout)));
        }
        if c.iter().all(|z| *z == Complex64::default()) {
            return Ok(());
        }
        self.check_cap(k, context)?;
        let slot = self
            .modes
            .entry(k.clone())
            .or_insert_with(|| vec![Complex64::default(); c.len()]);
        for (s, z) in slot.iter_mut().zip(c) {
            *s += z;
        }
        Ok(())
    }

    /// Inserts a coefficient already known to lie within the cap.
    pub(crate) fn put(&mut self, k: Freq, c: Vec<Complex64>) {
        if c.iter().any(|z| *z != Complex64::default()) {
            self.modes.insert(k, c);
        }
    }

    pub fn mode(&self, k: &Freq) -> Option<&[Complex64]> {
        self.modes.get(k).map(Vec::as_slice)
    }

    pub fn modes(&self) -> impl Iterator<Item = (&Freq, &[Complex64])> {
        self.modes.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn support(&self) -> impl Iterator<Item = &Freq> {
        self.modes.keys()
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    /// Largest `|k|∞` in the support.
    pub fn support_radius(&self) -> i32 {
        self.modes.keys().map(Freq::sup_norm).max().unwrap_or(0)
    }

    fn same_shape(&self, o: &FourierField) -> Result<()> {
        if self.layout != o.layout || self.ctx.n != o.ctx.n {
            return Err(Error::Layout(format!("{:?} vs {:?}", self.layout, o.layout)));
        }
        Ok(())
    }

    /// `self + s · other`.
    pub fn axpy(&self, s: Complex64, other: &FourierField) -> Result<FourierField> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (k, c) in &other.modes {
            let v: Vec<Complex64> = c.iter().map(|z| z * s).collect();
            out.add_mode(k, &v, "sum")?;
        }
        out.modes.retain(|_, v| v.iter().any(|z| *z != Complex64::default()));
        Ok(out)
    }

    pub fn add(&self, other: &FourierField) -> Result<FourierField> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &FourierField) -> Result<FourierField> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn scale(&self, s: Complex64) -> FourierField {
        self.map_modes(|_, c| c.iter().map(|z| z * s).collect())
    }

    pub fn scale_re(&self, s: f64) -> FourierField {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Applies a per-mode map with the same output layout.
    pub fn map_modes(&self, f: impl Fn(&Freq, &[Complex64]) -> Vec<Complex64>) -> FourierField {
        self.map_modes_to(self.layout.clone(), f)
    }

    /// Applies a per-mode map into another layout; supports are unchanged.
    pub fn map_modes_to(&self, layout: Layout, f: impl Fn(&Freq, &[Complex64]) -> Vec<Complex64>) -> FourierField {
        let mut out = FourierField::zero(self.ctx, layout);
        for (k, c) in &self.modes {
            out.put(k.clone(), f(k, c));
        }
        out
    }

    /// `(Σ_k Σ |c|²)^{1/2}`, the flat `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// `(Σ_k (1 + |2πk|²)^s Σ |c|²)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.modes
            .iter()
            .map(|(k, c)| (1.0 + k.eigenvalue()).powf(s) * c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .fold(0.0, |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.modes
            .values()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    /// `L²` inner product `Σ_k Σ conj(f) g`.
    pub fn inner(&self, other: &FourierField) -> Result<Complex64> {
        self.same_shape(other)?;
        Ok(self
            .modes
            .iter()
            .filter_map(|(k, a)| other.modes.get(k).map(|b| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>()))
            .sum())
    }

    /// Real iff `c_{−k} = conj(c_k)` for every `k`, up to `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        let zero = vec![Complex64::default(); self.layout.len()];
        self.modes.iter().all(|(k, c)| {
            let m = self.modes.get(&-k).unwrap_or(&zero);
            c.iter().zip(m).all(|(a, b)| (a - b.conj()).norm() <= tol)
        }) && self.modes.keys().all(|k| self.modes.contains_key(&-k) || self.modes[k].iter().all(|z| z.norm() <= tol))
    }

    /// Mode-zero coefficient, zeros if absent.
    pub fn mean(&self) -> Vec<Complex64> {
        self.mode(&Freq::zero(self.ctx.n))
            .map(<[Complex64]>::to_vec)
            .unwrap_or_else(|| vec![Complex64::default(); self.layout.len()])
    }

    /// Drops coefficients whose magnitude is below `eps` everywhere.
    pub fn prune(&self, eps: f64) -> FourierField {
        let mut out = self.clone();
        out.modes.retain(|_, v| v.iter().any(|z| z.norm() >= eps));
        out
    }

    /// Point value `Σ_k c_k e^{2πi k·x}`.
    pub fn evaluate(&self, x: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.layout.len()];
        for (k, c) in &self.modes {
            let phase: f64 = k.0.iter().zip(x).map(|(a, b)| *a as f64 * b).sum();
            let e = Complex64::from_polar(1.0, std::f64::consts::TAU * phase);
            for (o, z) in out.iter_mut().zip(c) {
                *o += z * e;
            }
        }
        out
    }

    /// The mode-zero coefficient as a form tuple.
    pub fn mean_tuple(&self) -> Result<FormTuple> {
        self.layout.tuple()?.from_complex_vec(&self.mean())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn cap_is_enforced() {
        let ctx = TorusCtx::with_cap(2, 3);
        let err = FourierField::single(ctx, Layout::Vector(2), Freq(vec![4, 0]), vec![c(1.0), c(0.0)]);
        assert!(matches!(err, Err(Error::SupportCap { cap: 3, .. })));
    }

    #[test]
    fn reality_predicate() {
        let ctx = TorusCtx::new(1);
        let mut f = FourierField::single(ctx, Layout::Vector(1), Freq(vec![1]), vec![Complex64::new(1.0, 2.0)]).unwrap();
        assert!(!f.is_real(1e-14));
        f.add_mode(&Freq(vec![-1]), &[Complex64::new(1.0, -2.0)], "test").unwrap();
        assert!(f.is_real(1e-14));
        let x = f.evaluate(&[0.3]);
        assert!(x[0].im.abs() < 1e-14);
    }

    #[test]
    fn sobolev_weights() {
        let ctx = TorusCtx::new(1);
        let f = FourierField::single(ctx, Layout::Vector(1), Freq(vec![1]), vec![c(1.0)]).unwrap();
        let w = 1.0 + 4.0 * std::f64::consts::PI.powi(2);
        assert!((f.sobolev_norm(2.0) - w).abs() < 1e-12);
        assert_eq!(f.l2_norm(), 1.0);
    }
}
