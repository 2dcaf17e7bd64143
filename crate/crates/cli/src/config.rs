use std::path::{Path, PathBuf};

use caldef::model::ModelKind;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Contents of a `--config` file. Every key is optional and command-line flags
/// take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub params: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub orders: Option<usize>,
    pub sobolev_s: Option<f64>,
    pub cap: Option<i32>,
    pub out: Option<PathBuf>,
    pub t: Option<Vec<f64>>,
    pub tolerances: Option<ToleranceConfig>,
    pub a1: Option<A1Config>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub closure: Option<f64>,
    pub harmonic: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: Vec<i32>,
    /// Row-major real parts of the endomorphism coefficient.
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Option<Vec<f64>>,
}

/// How the first-order term is chosen.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum A1Config {
    RandomHarmonic {
        #[serde(default)]
        amplitude: Option<f64>,
        #[serde(default)]
        amplitude_x: Option<f64>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Modes {
        modes: Vec<ModeSpec>,
    },
    /// A field file in the `caldef-field` format.
    File {
        path: PathBuf,
    },
    /// The built-in obstructed input for the degenerate model.
    Fixture {},
}

impl Default for A1Config {
    fn default() -> Self {
        A1Config::RandomHarmonic { amplitude: None, amplitude_x: None, seed: None }
    }
}

impl A1Config {
    /// Parses the `--a1` flag: `random-harmonic`, `fixture` or a file path.
    pub fn from_flag(s: &str) -> A1Config {
        match s {
            "random-harmonic" => A1Config::default(),
            "fixture" => A1Config::Fixture {},
            path => A1Config::File { path: PathBuf::from(path) },
        }
    }
}

/// Fully resolved settings of one invocation. Written next to the reports so
/// a run can be repeated from it.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    #[serde(skip)]
    pub command: String,
    pub model: Option<String>,
    pub params: String,
    pub seed: u64,
    pub trials: usize,
    pub orders: usize,
    pub sobolev_s: f64,
    pub cap: i32,
    pub out: Option<PathBuf>,
    pub t: Vec<f64>,
    pub tolerances: ToleranceConfig,
    pub a1: A1Config,
}

impl RunConfig {
    pub fn model_kind(&self) -> Result<Option<ModelKind>, Failure> {
        self.model
            .as_deref()
            .map(|name| ModelKind::parse(name, &self.params).map_err(|e| Failure::Usage(e.to_string())))
            .transpose()
    }

    pub fn require_model(&self) -> Result<ModelKind, Failure> {
        self.model_kind()?
            .ok_or_else(|| Failure::Usage(format!("`{}` needs --model", self.command)))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}

pub fn read_config(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}
