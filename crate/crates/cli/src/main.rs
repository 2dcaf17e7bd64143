//! `caldef` command-line driver.
//!
//! Exit codes: 0 pass, 1 usage or input error, 2 certification or
//! verification failure, 3 deformation obstructed.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{read_config, A1Config, FileConfig, RunConfig, ToleranceConfig};

#[derive(Debug, Parser)]
#[command(name = "caldef", version, about = "Calibration deformation checks on flat tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ellipticity certificate and cohomology cross-check for one model.
    Certify(Common),
    /// E-space ranks, isotropy and irreducible pieces.
    Dims(Common),
    /// Order-by-order deformation run on the flat torus.
    Deform(DeformArgs),
    /// Randomized identity suite for the generalized Lie derivative.
    VerifyIdentities(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML file with any of the settings below; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// symplectic, degenerate-symplectic, slnc, cy, hk, g2 or spin7.
    #[arg(long)]
    model: Option<String>,
    /// Model parameters such as `n=3` or `m=1`.
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random covectors for `certify`, instances per identity otherwise.
    #[arg(long)]
    trials: Option<usize>,
    /// Highest order N of the deformation series.
    #[arg(long)]
    orders: Option<usize>,
    /// Sobolev exponent used for reported norms.
    #[arg(long = "sobolev-s")]
    sobolev_s: Option<f64>,
    /// Largest allowed |k_i| of any Fourier mode.
    #[arg(long)]
    cap: Option<i32>,
    /// Directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DeformArgs {
    #[command(flatten)]
    common: Common,
    /// `random-harmonic`, `fixture`, or a path to a field file.
    #[arg(long)]
    a1: Option<String>,
    /// Comma-separated evaluation times.
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
}

/// Why a command did not pass.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Failed(String),
    Obstructed(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Failed(_) => 2,
            Failure::Obstructed(_) => 3,
        }
    }
}

impl From<caldef::Error> for Failure {
    fn from(e: caldef::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn resolve(name: &str, c: Common, a1: Option<String>, t: Option<Vec<f64>>) -> Result<RunConfig, Failure> {
    let file = match &c.config {
        Some(path) => read_config(path)?,
        None => FileConfig::default(),
    };
    let model = c.model.or(file.model);
    let a1 = match (a1, file.a1) {
        (Some(flag), _) => A1Config::from_flag(&flag),
        (None, Some(a)) => a,
        (None, None) if model.as_deref() == Some("degenerate-symplectic") => A1Config::Fixture {},
        (None, None) => A1Config::default(),
    };
    let cfg = RunConfig {
        command: name.to_string(),
        model,
        params: c.params.or(file.params).unwrap_or_default(),
        seed: c.seed.or(file.seed).unwrap_or(1),
        trials: c.trials.or(file.trials).unwrap_or(100),
        orders: c.orders.or(file.orders).unwrap_or(8),
        sobolev_s: c.sobolev_s.or(file.sobolev_s).unwrap_or(6.0),
        cap: c.cap.or(file.cap).unwrap_or(caldef::torus::DEFAULT_CAP),
        out: c.out.or(file.out),
        t: t.or(file.t).unwrap_or_else(|| caldef::deform::DEFAULT_T_GRID.to_vec()),
        tolerances: file.tolerances.unwrap_or_else(ToleranceConfig::default),
        a1,
    };
    if cfg.orders == 0 || cfg.trials == 0 || cfg.cap <= 0 {
        return Err(Failure::Usage("--orders, --trials and --cap must be positive".into()));
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Certify(c) => resolve("certify", c, None, None).and_then(|cfg| commands::certify(&cfg)),
        Command::Dims(c) => resolve("dims", c, None, None).and_then(|cfg| commands::dims(&cfg)),
        Command::Deform(d) => resolve("deform", d.common, d.a1, d.t).and_then(|cfg| commands::deform(&cfg)),
        Command::VerifyIdentities(c) => {
            resolve("verify-identities", c, None, None).and_then(|cfg| commands::verify_identities(&cfg))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Failed(m) | Failure::Obstructed(m) => eprintln!("{m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
