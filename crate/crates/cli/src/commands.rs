use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use caldef::deform::{
    degenerate_fixture, majorant_diagnostic, single_mode_a1, DeformationProblem, Engine, Tolerances,
};
use caldef::identities::verify_identities as run_identities;
use caldef::model::{
    build_model, certify_ellipticity, e_space, hyperkahler_invariant_two_forms, isotropy_algebra, CalibrationModel,
    G2Structure, ModelKind, Spin7Structure, DEFECT_TOL, K_MAX,
};
use caldef::torus::{
    cohomology_dims, cohomology_formula, read_field, write_field, CohomologyDim, FourierField, Freq, HodgePackage,
    Layout, TorusCtx,
};
use caldef::{Complex64, Error};

use crate::config::{A1Config, RunConfig};
use crate::Failure;

/// A command's output: a human-readable table followed by `key=value` lines.
struct Report {
    human: String,
    machine: String,
}

impl Report {
    fn new() -> Self {
        Report { human: String::new(), machine: String::new() }
    }

    fn text(&self) -> String {
        format!("{}\n{}", self.human, self.machine)
    }
}

fn out_dir(cfg: &RunConfig) -> Result<Option<&Path>, Failure> {
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
            Ok(Some(dir))
        }
        None => Ok(None),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Prints the report and, with `--out`, saves it with the resolved config.
fn emit(cfg: &RunConfig, report: &Report) -> Result<(), Failure> {
    print!("{}", report.text());
    if let Some(dir) = out_dir(cfg)? {
        write_file(&dir.join(format!("{}.txt", cfg.command)), &report.text())?;
        write_file(&dir.join("config.toml"), &cfg.to_toml())?;
    }
    Ok(())
}

pub fn certify(cfg: &RunConfig) -> Result<(), Failure> {
    let kind = cfg.require_model()?;
    let model = build_model(kind)?;
    let cert = certify_ellipticity(&model, cfg.trials, cfg.seed)?;
    let mut r = Report::new();
    let _ = writeln!(
        r.human,
        "ellipticity certificate for {kind}: {} axis + {} random covectors, seed {}",
        cert.axis_trials, cert.random_trials, cert.seed
    );
    let _ = writeln!(r.human, "{:>6}  {:>12}  {:>8}  {:>8}", "stage", "max defect", "ker", "image");
    for s in &cert.stages {
        let _ = writeln!(r.human, "{:>6}  {:>12.3e}  {:>8}  {:>8}", s.stage, s.max_defect, s.worst_dims.0, s.worst_dims.1);
        let _ = writeln!(
            r.machine,
            "certify model={kind} stage={} max_defect={:e} ker={} image={} worst_trial={}",
            s.stage, s.max_defect, s.worst_dims.0, s.worst_dims.1, s.worst_trial
        );
    }

    let pkg = HodgePackage::new(&model)?;
    let dims = cohomology_dims(&pkg, 2)?;
    let mut consistent = true;
    let _ = writeln!(r.human, "\ntorus cohomology of the # complex (modes |k|_inf <= 1)");
    let _ = writeln!(r.human, "{:>4}  {:>8}  {:>8}", "j", "modes", "formula");
    for (j, dim) in dims.iter().enumerate() {
        let formula = cohomology_formula(&model, j)?;
        let agrees = match (dim, formula) {
            (CohomologyDim::Finite(a), Some(b)) => *a == b,
            (CohomologyDim::Finite(_), None) => true,
            (CohomologyDim::Infinite, _) => false,
        };
        consistent &= agrees;
        let f = formula.map_or_else(|| "-".to_string(), |v| v.to_string());
        let _ = writeln!(r.human, "{j:>4}  {dim:>8}  {f:>8}");
        let _ = writeln!(r.machine, "cohomology model={kind} j={j} modes={dim} formula={f} agrees={agrees}");
    }
    let pass = cert.pass && consistent;
    let verdict = match cert.failed_stage() {
        Some(stage) => format!("FAIL: exactness defect >= {DEFECT_TOL:e} at stage {stage}"),
        None if !consistent => "FAIL: cohomology cross-check".to_string(),
        None => "PASS".to_string(),
    };
    let _ = writeln!(r.human, "\n{verdict}");
    let _ = writeln!(r.machine, "verdict model={kind} pass={pass} max_defect={:e}", cert.max_defect);
    emit(cfg, &r)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Failed(format!("certification failed for {kind}")))
    }
}

const DEFAULT_DIMS_MODELS: [ModelKind; 6] = [
    ModelKind::Symplectic { n: 2 },
    ModelKind::SLnC { n: 3 },
    ModelKind::CalabiYau { n: 3 },
    ModelKind::HyperKahler { m: 1 },
    ModelKind::G2,
    ModelKind::Spin7,
];

fn split(ranks: &[usize]) -> String {
    ranks.iter().map(usize::to_string).collect::<Vec<_>>().join("/")
}

/// Extra representation-theoretic rows for the models that have them.
fn pieces(model: &CalibrationModel) -> Result<Vec<(String, String)>, Error> {
    Ok(match model.kind() {
        ModelKind::HyperKahler { m } => vec![("L2_hk".into(), hyperkahler_invariant_two_forms(m)?.to_string())],
        ModelKind::G2 => {
            let (two, three) = G2Structure::new(model)?.ranks();
            vec![("L2".into(), split(&two)), ("L3".into(), split(&three))]
        }
        ModelKind::Spin7 => {
            let r = Spin7Structure::new(model)?.ranks();
            vec![("L2".into(), split(&r[0])), ("L3".into(), split(&r[1])), ("L4".into(), split(&r[2]))]
        }
        _ => Vec::new(),
    })
}

pub fn dims(cfg: &RunConfig) -> Result<(), Failure> {
    let kinds = match cfg.model_kind()? {
        Some(k) => vec![k],
        None => DEFAULT_DIMS_MODELS.to_vec(),
    };
    let mut r = Report::new();
    let mut head = format!("{:<16}", "model");
    for k in 0..=K_MAX {
        let _ = write!(head, "  {:>4}", format!("E{k}"));
    }
    let _ = writeln!(r.human, "{head}  {:>9}  pieces", "isotropy");
    for kind in kinds {
        let model = build_model(kind)?;
        let ranks = (0..=K_MAX).map(|k| e_space(&model, k).map(|s| s.rank())).collect::<Result<Vec<_>, _>>()?;
        let iso = isotropy_algebra(&model)?.rank();
        let extra = pieces(&model)?;
        let mut row = format!("{:<16}", kind.to_string());
        for d in &ranks {
            let _ = write!(row, "  {d:>4}");
        }
        let listed = extra.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(r.human, "{row}  {iso:>9}  {listed}");
        let e = ranks.iter().enumerate().map(|(k, d)| format!("E{k}={d}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(r.machine, "dims model={kind} {e} isotropy={iso}{}{listed}", if listed.is_empty() { "" } else { " " });
    }
    emit(cfg, &r)
}

/// Each listed mode `k != 0` also contributes its conjugate at `-k`, so the
/// field is real.
fn field_from_modes(ctx: TorusCtx, modes: &[crate::config::ModeSpec]) -> Result<FourierField, Failure> {
    let n = ctx.n;
    let mut f = FourierField::zero(ctx, Layout::Endo(n));
    for m in modes {
        if m.k.len() != n || m.re.len() != n * n || m.im.as_ref().is_some_and(|im| im.len() != n * n) {
            return Err(Failure::Usage(format!("a1 mode {:?} needs {n} frequencies and {} entries", m.k, n * n)));
        }
        let c: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new(m.re[i], m.im.as_ref().map_or(0.0, |im| im[i])))
            .collect();
        f.add_mode(&Freq(m.k.clone()), &c, "a1")?;
        if m.k.iter().any(|&v| v != 0) {
            let conj: Vec<Complex64> = c.iter().map(Complex64::conj).collect();
            f.add_mode(&Freq(m.k.iter().map(|v| -v).collect()), &conj, "a1")?;
        }
    }
    Ok(f)
}

/// The same coefficients under a different support cap.
fn recap(f: &FourierField, ctx: TorusCtx) -> Result<FourierField, Failure> {
    let mut out = FourierField::zero(ctx, f.layout.clone());
    for (k, c) in f.modes() {
        out.add_mode(k, c, "a1")?;
    }
    Ok(out)
}

fn first_order(cfg: &RunConfig, kind: ModelKind) -> Result<(CalibrationModel, FourierField), Failure> {
    if cfg.a1 == (A1Config::Fixture {}) {
        if kind != ModelKind::DegenerateSymplectic {
            return Err(Failure::Usage("the fixture first-order term belongs to degenerate-symplectic".into()));
        }
        return Ok(degenerate_fixture()?);
    }
    let model = build_model(kind)?;
    let ctx = TorusCtx::with_cap(model.dim(), cfg.cap);
    let a1 = match &cfg.a1 {
        A1Config::RandomHarmonic { amplitude, amplitude_x, seed } => {
            single_mode_a1(&model, amplitude.unwrap_or(0.5), amplitude_x.unwrap_or(0.5), seed.unwrap_or(cfg.seed))?
        }
        A1Config::Modes { modes } => field_from_modes(ctx, modes)?,
        A1Config::File { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            read_field(&text)?
        }
        A1Config::Fixture {} => unreachable!(),
    };
    Ok((model, a1))
}

pub fn deform(cfg: &RunConfig) -> Result<(), Failure> {
    let kind = cfg.require_model()?;
    let (model, a1) = first_order(cfg, kind)?;
    let ctx = TorusCtx::with_cap(model.dim(), cfg.cap);
    let a1 = recap(&a1, ctx)?;
    let mut p = DeformationProblem::new(model, a1);
    p.orders = cfg.orders;
    p.sobolev_s = cfg.sobolev_s;
    p.t_eval = cfg.t.clone();
    let defaults = Tolerances::default();
    p.tol = Tolerances {
        closure_tol: cfg.tolerances.closure.unwrap_or(defaults.closure_tol),
        harmonic_tol: cfg.tolerances.harmonic.unwrap_or(defaults.harmonic_tol),
    };
    let engine = Engine::for_problem(&p)?;
    let mut r = Report::new();
    let run = match engine.run(&p) {
        Ok(run) => run,
        Err(Error::Obstructed(class)) => {
            let dir = out_dir(cfg)?.map_or_else(|| PathBuf::from("."), Path::to_path_buf);
            let path = dir.join("obstruction-class.field");
            write_file(&path, &write_field(&class.representative))?;
            let _ = writeln!(
                r.human,
                "{kind}: obstructed at order {}\n  harmonic part norm {:.4e} ({:.3e} of |Ob_k|), E2 membership residual {:.2e}\n  class written to {}",
                class.order,
                class.norm,
                class.relative_residue,
                class.membership_residual,
                path.display()
            );
            let _ = writeln!(
                r.machine,
                "obstruction model={kind} order={} norm={:e} relative_residue={:e} membership={:e} modes={} class_file={}",
                class.order,
                class.norm,
                class.relative_residue,
                class.membership_residual,
                class.representative.num_modes(),
                path.display()
            );
            emit(cfg, &r)?;
            return Err(Failure::Obstructed(format!("deformation of {kind} obstructed at order {}", class.order)));
        }
        Err(e) => return Err(e.into()),
    };

    r.human.push_str(&run.trace.human_table());
    r.machine.push_str(&run.trace.machine_lines());
    let _ = writeln!(r.human, "\n{:>8}  {:>12}  {:>12}  {:>6}", "t", "|dPhi_t|", "|dPhi_t|_L2", "terms");
    for &t in &cfg.t {
        let ev = engine.evaluate(&run.coefficients, t)?;
        let _ = writeln!(r.human, "{t:>8}  {:>12.4e}  {:>12.4e}  {:>6}", ev.residual, ev.residual_l2, ev.exp_terms);
        let _ = writeln!(
            r.machine,
            "eval t={t} residual={:e} residual_l2={:e} terms={}",
            ev.residual, ev.residual_l2, ev.exp_terms
        );
        if let Some(radius) = run.trace.radius_estimate {
            if t.abs() > radius {
                eprintln!("warning: t = {t} exceeds the radius estimate {radius:.4e}");
                let _ = writeln!(r.human, "warning: t = {t} exceeds the radius estimate {radius:.4e}");
                let _ = writeln!(r.machine, "warning t={t} radius_estimate={radius:e}");
            }
        }
    }
    let m = majorant_diagnostic(&run.trace.a_norms());
    let _ = writeln!(
        r.human,
        "\nmajorant: b = {:.4e}, c = {:.4e}, radius >= {:.4e}, fits = {}",
        m.b, m.c, m.radius_lower_bound, m.fits
    );
    let _ = writeln!(r.machine, "majorant b={:e} c={:e} radius={:e} fits={}", m.b, m.c, m.radius_lower_bound, m.fits);
    emit(cfg, &r)?;
    if let Some(dir) = out_dir(cfg)? {
        for (i, a) in run.coefficients.iter().enumerate() {
            write_file(&dir.join(format!("a{}.field", i + 1)), &write_field(a))?;
        }
    }
    Ok(())
}

pub fn verify_identities(cfg: &RunConfig) -> Result<(), Failure> {
    let reports = run_identities(cfg.trials, cfg.seed)?;
    let mut r = Report::new();
    let _ = writeln!(
        r.human,
        "{:<20}  {:>6}  {:>12}  {:>12}  {:>10}  {:>10}  {:>4}",
        "identity", "trials", "max resid", "membership", "|lhs|", "|rhs|", ""
    );
    for rep in &reports {
        let member = rep.max_membership.map_or_else(|| "-".to_string(), |m| format!("{m:.3e}"));
        let _ = writeln!(
            r.human,
            "{:<20}  {:>6}  {:>12.3e}  {:>12}  {:>10.3e}  {:>10.3e}  {:>4}",
            rep.name,
            rep.trials,
            rep.max_residual,
            member,
            rep.lhs_norm,
            rep.rhs_norm,
            if rep.pass() { "ok" } else { "FAIL" }
        );
        let _ = writeln!(
            r.machine,
            "identity name={} trials={} max_residual={:e} membership={} lhs_norm={:e} rhs_norm={:e} pass={}",
            rep.name,
            rep.trials,
            rep.max_residual,
            rep.max_membership.map_or_else(|| "-".to_string(), |m| format!("{m:e}")),
            rep.lhs_norm,
            rep.rhs_norm,
            rep.pass()
        );
    }
    emit(cfg, &r)?;
    if reports.iter().all(|rep| rep.pass()) {
        Ok(())
    } else {
        Err(Failure::Failed("identity suite failed".into()))
    }
}
