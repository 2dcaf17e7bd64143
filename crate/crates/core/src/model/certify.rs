use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::espace::{e_layout, e_space};
use super::CalibrationModel;
use crate::exterior::{wedge, Form, TupleLayout};
use crate::linalg::{column_space, null_space, spectral_norm, RANK_TOL};
use crate::Result;

/// Verdict threshold on the exactness defect.
pub const DEFECT_TOL: f64 = 1e-8;

/// Worst case over all trial covectors at one stage `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub stage: usize,
    pub max_defect: f64,
    /// `dim ker(∧u | E^k)` and `rank(∧u : E^{k−1} → E^k)` at the worst trial.
    pub worst_dims: (usize, usize),
    pub worst_trial: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticityCertificate {
    pub model: String,
    pub stages: Vec<StageReport>,
    /// Coordinate covectors `e^1, ..., e^n` are always tried first.
    pub axis_trials: usize,
    pub random_trials: usize,
    pub seed: u64,
    pub max_defect: f64,
    pub pass: bool,
}

impl EllipticityCertificate {
    /// The first stage that fails, if any.
    pub fn failed_stage(&self) -> Option<usize> {
        self.stages.iter().find(|s| s.max_defect >= DEFECT_TOL).map(|s| s.stage)
    }
}

/// Matrix of `x ↦ u ∧ x` from `layout` to `layout` shifted by one.
pub fn wedge_matrix(u: &[f64], layout: &TupleLayout) -> DMatrix<f64> {
    let target = layout.shifted(1);
    let uf = Form::covector(u);
    let mut m = DMatrix::zeros(target.len(), layout.len());
    let mut unitv = vec![0.0; layout.len()];
    for col in 0..layout.len() {
        unitv[col] = 1.0;
        let x = layout.from_real_vec(&unitv).expect("layout length");
        unitv[col] = 0.0;
        let y = x.map(|f| wedge(&uf, f));
        let v = target.to_real_vec(&y).expect("target layout");
        m.set_column(col, &nalgebra::DVector::from_vec(v));
    }
    m
}

struct Trial {
    defect: f64,
    dims: (usize, usize),
}

fn stage_defect(
    u: &[f64],
    prev: &DMatrix<f64>,
    prev_layout: &TupleLayout,
    cur: &DMatrix<f64>,
    cur_layout: &TupleLayout,
) -> Result<Trial> {
    let image = column_space(&(wedge_matrix(u, prev_layout) * prev), RANK_TOL)?;
    let coeffs = null_space(&(wedge_matrix(u, cur_layout) * cur), RANK_TOL)?;
    let kernel = cur * coeffs;
    let dims = (kernel.ncols(), image.ncols());
    if kernel.ncols() == 0 {
        return Ok(Trial { defect: 0.0, dims });
    }
    let outside = &kernel - &image * (image.transpose() * &kernel);
    let defect = spectral_norm(&outside);
    Ok(Trial { defect, dims })
}

/// Checks exactness of `E^{k−1} → E^k → E^{k+1}` under `∧u` at `k = 1, 2`,
/// for the coordinate covectors and `trials` random unit covectors.
pub fn certify_ellipticity(model: &CalibrationModel, trials: usize, seed: u64) -> Result<EllipticityCertificate> {
    let n = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut covectors: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..n).map(|b| if a == b { 1.0 } else { 0.0 }).collect())
        .collect();
    covectors.extend((0..trials).map(|_| unit_vector(&mut rng, n)));

    let spaces = (0..=2).map(|k| e_space(model, k)).collect::<Result<Vec<_>>>()?;
    let layouts: Vec<TupleLayout> = (0..=2).map(|k| e_layout(model, k)).collect();
    let mut stages = Vec::new();
    for stage in 1..=2 {
        let mut report = StageReport { stage, max_defect: 0.0, worst_dims: (0, 0), worst_trial: 0 };
        for (t, u) in covectors.iter().enumerate() {
            let trial = stage_defect(
                u,
                spaces[stage - 1].basis(),
                &layouts[stage - 1],
                spaces[stage].basis(),
                &layouts[stage],
            )?;
            if trial.defect > report.max_defect || t == 0 {
                report.max_defect = report.max_defect.max(trial.defect);
                report.worst_dims = trial.dims;
                report.worst_trial = t;
            }
        }
        stages.push(report);
    }
    let max_defect = stages.iter().map(|s| s.max_defect).fold(0.0, f64::max);
    Ok(EllipticityCertificate {
        model: model.kind().to_string(),
        stages,
        axis_trials: n,
        random_trials: trials,
        seed,
        max_defect,
        pass: max_defect < DEFECT_TOL,
    })
}

/// Uniform point on the unit sphere.
pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
