//! Flat model calibrations and their linear algebra.

mod certify;
mod check;
mod cy;
mod descriptor;
mod espace;
mod g2;
mod spin7;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::exterior::{hodge_star, wedge, Form, FormTuple, Metric, Orientation, TupleLayout};
use crate::linalg::Subspace;
use crate::{Error, Result};

pub use check::{check_model, complex_structure, kernel_basis, two_form_matrix};
pub use cy::{cy_tangent_split, hodge_type, CyTangentSplit};
pub use descriptor::{parse_descriptor, to_descriptor};
pub use g2::{ContractionReport, G2Structure};
pub use spin7::{form_to_skew, skew_to_form, Spin7Structure};
pub use certify::{certify_ellipticity, unit_vector, wedge_matrix, EllipticityCertificate, StageReport, DEFECT_TOL};




pub use espace::{
    e1_from_rho, e_generators, e_layout, e_space, isotropy_algebra, rho_generator_matrix,
    K_MAX,
};



/// Which calibration, with its size parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `ω = Σ dx^i ∧ dy^i` on `R^{2n}`.
    Symplectic { n: usize },
    /// `ω = dx^1 ∧ dx^2` on `R^4`, a 2-form with `ω ∧ ω = 0`.
    DegenerateSymplectic,
    /// `Ω = Π (dx^j + i dy^j)` on `R^{2n}`.
    SLnC { n: usize },
    /// `(Ω, ω)` on `R^{2n}`.
    CalabiYau { n: usize },
    /// `(ω_I, ω_J + i ω_K)` on `R^{4m}`.
    HyperKahler { m: usize },
    G2,
    Spin7,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Symplectic { .. } => "symplectic",
            ModelKind::DegenerateSymplectic => "degenerate-symplectic",
            ModelKind::SLnC { .. } => "slnc",
            ModelKind::CalabiYau { .. } => "cy",
            ModelKind::HyperKahler { .. } => "hk",
            ModelKind::G2 => "g2",
            ModelKind::Spin7 => "spin7",
        }
    }

    /// `key=value` parameter string, `-` when there are none.
    pub fn params(&self) -> String {
        match self {
            ModelKind::Symplectic { n } | ModelKind::SLnC { n } | ModelKind::CalabiYau { n } => {
                format!("n={n}")
            }
            ModelKind::HyperKahler { m } => format!("m={m}"),
            _ => "-".into(),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            ModelKind::Symplectic { n } | ModelKind::SLnC { n } | ModelKind::CalabiYau { n } => 2 * n,
            ModelKind::DegenerateSymplectic => 4,
            ModelKind::HyperKahler { m } => 4 * m,
            ModelKind::G2 => 7,
            ModelKind::Spin7 => 8,
        }
    }

    /// Which stored components are complex.
    pub fn complex_parts(&self) -> Vec<bool> {
        match self {
            ModelKind::Symplectic { .. } | ModelKind::DegenerateSymplectic => vec![false],
            ModelKind::SLnC { .. } => vec![true],
            ModelKind::CalabiYau { .. } => vec![true, false],
            ModelKind::HyperKahler { .. } => vec![false, true],
            ModelKind::G2 => vec![false, false],
            ModelKind::Spin7 => vec![false],
        }
    }

    /// Parses a model name and a comma-separated `key=value` list.
    pub fn parse(name: &str, params: &str) -> Result<Self> {
        let mut n = None;
        let mut m = None;
        for kv in params.split(',').map(str::trim).filter(|s| !s.is_empty() && *s != "-") {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("parameter `{kv}` is not key=value")))?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("parameter `{kv}` is not a positive integer")))?;
            match k.trim() {
                "n" => n = Some(v),
                "m" => m = Some(v),
                other => return Err(Error::Invalid(format!("unknown parameter `{other}`"))),
            }
        }
        let kind = match name.to_ascii_lowercase().as_str() {
            "symplectic" => ModelKind::Symplectic { n: n.unwrap_or(2) },
            "degenerate-symplectic" => ModelKind::DegenerateSymplectic,
            "slnc" | "sl" | "sln" => ModelKind::SLnC { n: n.unwrap_or(3) },
            "cy" | "calabi-yau" => ModelKind::CalabiYau { n: n.unwrap_or(3) },
            "hk" | "hyperkahler" => ModelKind::HyperKahler { m: m.unwrap_or(1) },
            "g2" => ModelKind::G2,
            "spin7" => ModelKind::Spin7,
            other => return Err(Error::UnsupportedModel(other.to_string())),
        };
        let used_n = matches!(kind, ModelKind::Symplectic { .. } | ModelKind::SLnC { .. } | ModelKind::CalabiYau { .. });
        let used_m = matches!(kind, ModelKind::HyperKahler { .. });
        if (n.is_some() && !used_n) || (m.is_some() && !used_m) {
            return Err(Error::Invalid(format!("parameters `{params}` do not apply to {name}")));
        }
        Ok(kind)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.params().as_str() {
            "-" => write!(f, "{}", self.name()),
            p => write!(f, "{}({p})", self.name()),
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    /// Accepts `name` or `name(k=v,...)`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('(') {
            Some((name, rest)) => ModelKind::parse(name, rest.trim_end_matches(')')),
            None => ModelKind::parse(s, ""),
        }
    }
}

/// A constant-coefficient model calibration on `R^n`.
#[derive(Clone, Debug)]
pub struct CalibrationModel {
    kind: ModelKind,
    phi0: FormTuple,
    real_phi0: FormTuple,
    metric0: Metric,
    orientation: Orientation,
    espaces: [OnceLock<Subspace>; K_MAX + 1],
    isotropy: OnceLock<Subspace>,
}

impl CalibrationModel {
    /// Wraps explicit forms. The structure equations are not enforced; see
    /// [`check_model`].
    pub fn with_forms(kind: ModelKind, phi0: FormTuple, orientation: Orientation) -> Result<Self> {
        let flags = kind.complex_parts();
        if phi0.parts().len() != flags.len() {
            return Err(Error::Layout(format!(
                "{} expects {} components, got {}",
                kind.name(),
                flags.len(),
                phi0.parts().len()
            )));
        }
        let dim = phi0.dim();
        let mut blocks = Vec::new();
        for (part, &complex) in phi0.parts().iter().zip(&flags) {
            if complex {
                blocks.push(part.re());
                blocks.push(part.im());
            } else {
                if !part.is_real(0.0) {
                    return Err(Error::Invalid(format!(
                        "a real component of {} has imaginary coefficients",
                        kind.name()
                    )));
                }
                blocks.push(part.clone());
            }
        }
        Ok(CalibrationModel {
            kind,
            phi0: phi0.clone(),
            real_phi0: FormTuple::new(blocks)?,
            metric0: Metric::euclidean(dim),
            orientation,
            espaces: Default::default(),
            isotropy: OnceLock::new(),
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.phi0.dim()
    }

    /// Stored components, complex where the structure is complex.
    pub fn phi0(&self) -> &FormTuple {
        &self.phi0
    }

    /// Real blocks: complex components split into real and imaginary parts.
    pub fn real_phi0(&self) -> &FormTuple {
        &self.real_phi0
    }

    pub fn real_layout(&self) -> TupleLayout {
        self.real_phi0.layout()
    }

    pub fn metric0(&self) -> &Metric {
        &self.metric0
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn star(&self, a: &Form) -> Form {
        hodge_star(&self.metric0, self.orientation, a)
    }

    pub(crate) fn espace_cache(&self, k: usize) -> &OnceLock<Subspace> {
        &self.espaces[k]
    }

    pub(crate) fn isotropy_cache(&self) -> &OnceLock<Subspace> {
        &self.isotropy
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `Σ_{j<n} e^{2j} ∧ e^{2j+1}` in dimension `dim`.
pub fn kahler_form(dim: usize, n: usize) -> Form {
    let mut w = Form::zero(dim, 2);
    for j in 0..n {
        w = w.add(&Form::basis(dim, &[2 * j, 2 * j + 1]).expect("in range"));
    }
    w
}

/// `Π_{j<n} (e^{2j} + i e^{2j+1})` in dimension `dim`.
pub fn holomorphic_volume(dim: usize, n: usize) -> Form {
    let mut out = Form::scalar(dim, one());
    for j in 0..n {
        let dz = Form::basis(dim, &[2 * j])
            .expect("in range")
            .axpy(Complex64::new(0.0, 1.0), &Form::basis(dim, &[2 * j + 1]).expect("in range"));
        out = wedge(&out, &dz);
    }
    out
}

/// `(φ, ψ)` of the flat G2 model in dimension `dim` (7 or 8).
fn g2_forms(dim: usize) -> (Form, Form) {
    let omega = kahler_form(dim, 3);
    let big = holomorphic_volume(dim, 3);
    let dt = Form::basis(dim, &[6]).expect("in range");
    let phi = wedge(&omega, &dt).add(&big.im());
    let psi = wedge(&omega, &omega).scale_re(0.5).sub(&wedge(&big.re(), &dt));
    (phi, psi)
}

/// Standard quaternionic Kähler forms `(ω_I, ω_J, ω_K)` on `R^{4m}`, from left
/// multiplication by `i, j, k` on each block `x_0 + x_1 i + x_2 j + x_3 k`.
pub fn hyperkahler_forms(m: usize) -> [Form; 3] {
    let dim = 4 * m;
    let e = |a: usize, b: usize| Form::basis(dim, &[a, b]).expect("in range");
    let mut out = [Form::zero(dim, 2), Form::zero(dim, 2), Form::zero(dim, 2)];
    for b in 0..m {
        let o = 4 * b;
        out[0] = out[0].add(&e(o, o + 1)).add(&e(o + 2, o + 3));
        out[1] = out[1].add(&e(o, o + 2)).sub(&e(o + 1, o + 3));
        out[2] = out[2].add(&e(o, o + 3)).add(&e(o + 1, o + 2));
    }
    out
}

/// `dim Λ²_HK`: real 2-forms of type (1,1) for each of the three complex
/// structures, i.e. `IᵀAI = A` for the matrix `A` of the form.
pub fn hyperkahler_invariant_two_forms(m: usize) -> Result<usize> {
    let dim = 4 * m;
    let structures: Vec<_> = hyperkahler_forms(m).iter().map(two_form_matrix).collect();
    let size = crate::exterior::binomial(dim, 2);
    let mut rows = nalgebra::DMatrix::zeros(3 * dim * dim, size);
    for col in 0..size {
        let mut v = vec![0.0; size];
        v[col] = 1.0;
        let a = two_form_matrix(&Form::from_dense_real(dim, 2, &v)?);
        for (s, i) in structures.iter().enumerate() {
            let defect = i.transpose() * &a * i - &a;
            for (r, x) in defect.iter().enumerate() {
                rows[(s * dim * dim + r, col)] = *x;
            }
        }
    }
    Ok(size - crate::linalg::stable_rank(&rows, 1e-9)?)
}

fn pick_orientation(target: impl Fn(Orientation) -> f64) -> Orientation {
    if target(Orientation::Positive) <= target(Orientation::Negative) {
        Orientation::Positive
    } else {
        Orientation::Negative
    }
}

/// Builds the flat model of the given kind.
pub fn build_model(kind: ModelKind) -> Result<CalibrationModel> {
    let dim = kind.dim();
    let bad = |why: &str| Err(Error::UnsupportedModel(format!("{kind}: {why}")));
    match kind {
        ModelKind::Symplectic { n } | ModelKind::SLnC { n } | ModelKind::CalabiYau { n } if n == 0 || 2 * n > 16 => {
            return bad("need 1 <= n <= 8");
        }
        ModelKind::HyperKahler { m } if m == 0 || 4 * m > 16 => return bad("need 1 <= m <= 4"),
        _ => {}
    }
    let (parts, orientation) = match kind {
        ModelKind::Symplectic { n } => (vec![kahler_form(dim, n)], Orientation::Positive),
        ModelKind::DegenerateSymplectic => (vec![Form::basis(4, &[0, 1])?], Orientation::Positive),
        ModelKind::SLnC { n } => (vec![holomorphic_volume(dim, n)], Orientation::Positive),
        ModelKind::CalabiYau { n } => {
            (vec![holomorphic_volume(dim, n), kahler_form(dim, n)], Orientation::Positive)
        }
        ModelKind::HyperKahler { m } => {
            let [wi, wj, wk] = hyperkahler_forms(m);
            let wc = wj.axpy(Complex64::new(0.0, 1.0), &wk);
            (vec![wi, wc], Orientation::Positive)
        }
        ModelKind::G2 => {
            let (phi, psi) = g2_forms(7);
            let m = Metric::euclidean(7);
            let o = pick_orientation(|o| hodge_star(&m, o, &phi).distance(&psi));
            (vec![phi, psi], o)
        }
        ModelKind::Spin7 => {
            let (phi, psi) = g2_forms(8);
            let cayley = wedge(&phi, &Form::basis(8, &[7])?).add(&psi);
            let m = Metric::euclidean(8);
            let o = pick_orientation(|o| hodge_star(&m, o, &cayley).distance(&cayley));
            (vec![cayley], o)
        }
    };
    CalibrationModel::with_forms(kind, FormTuple::new(parts)?, orientation)
}

/// `c_n = (−1)^{n(n−1)/2} 2^n / (i^n n!)`, so that `Ω ∧ Ω̄ = c_n ω^n` on the flat model.
pub fn cy_constant(n: usize) -> Complex64 {
    let sign = if (n * (n.saturating_sub(1)) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let i_n = Complex64::new(0.0, 1.0).powu(n as u32);
    Complex64::new(sign * 2f64.powi(n as i32) / fact, 0.0) / i_n
}
