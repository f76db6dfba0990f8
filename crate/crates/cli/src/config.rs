//! Run configuration: a TOML file merged with command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use esvqe::pools::PoolConvention;
use esvqe::vqe::OptMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Hf,
    Fci,
    Vqe,
    EsVqe,
    AdaptVqe,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Hf => "hf",
            Method::Fci => "fci",
            Method::Vqe => "vqe",
            Method::EsVqe => "es-vqe",
            Method::AdaptVqe => "adapt-vqe",
        }
    }

    pub fn uses_pool(self) -> bool {
        matches!(self, Method::Vqe | Method::EsVqe | Method::AdaptVqe)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum PoolKind {
    #[serde(rename = "uccsd")]
    #[value(name = "uccsd")]
    Uccsd,
    #[serde(rename = "uccgsd")]
    #[value(name = "uccgsd")]
    Uccgsd,
    #[serde(rename = "qcc")]
    #[value(name = "qcc")]
    Qcc,
    #[serde(rename = "uccsd+aux")]
    #[value(name = "uccsd+aux")]
    UccsdAux,
    #[serde(rename = "uccgsd+aux")]
    #[value(name = "uccgsd+aux")]
    UccgsdAux,
}

impl PoolKind {
    pub fn name(self) -> &'static str {
        match self {
            PoolKind::Uccsd => "uccsd",
            PoolKind::Uccgsd => "uccgsd",
            PoolKind::Qcc => "qcc",
            PoolKind::UccsdAux => "uccsd+aux",
            PoolKind::UccgsdAux => "uccgsd+aux",
        }
    }

    pub const ALL: [PoolKind; 5] =
        [PoolKind::Uccsd, PoolKind::Uccgsd, PoolKind::Qcc, PoolKind::UccsdAux, PoolKind::UccgsdAux];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    JsonLines,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    SpinAdapted,
    SpinOrbital,
}

impl From<Convention> for PoolConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::SpinAdapted => PoolConvention::SpinAdapted,
            Convention::SpinOrbital => PoolConvention::SpinOrbital,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Single,
}

impl From<Mode> for OptMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Full => OptMode::Full,
            Mode::Single => OptMode::Single,
        }
    }
}

/// Bad or inconsistent settings. Reported with exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Settings as they appear in a config file or on the command line. Every
/// field is optional so the two sources can be layered.
#[derive(Clone, Debug, Default, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunArgs {
    /// TOML file with any of the settings below (keys use underscores).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// FCIDUMP input; repeat for a scan. A `<stem>.json` sidecar supplies the geometry label.
    #[arg(long)]
    #[serde(default)]
    pub fcidump: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, value_enum)]
    pub pool: Option<PoolKind>,
    #[arg(long, value_enum)]
    pub pool_convention: Option<Convention>,
    #[arg(long)]
    pub eps_a: Option<f64>,
    #[arg(long)]
    pub eps_b: Option<f64>,
    #[arg(long)]
    pub eps_c: Option<f64>,
    #[arg(long, value_enum)]
    pub opt_mode: Option<Mode>,
    #[arg(long)]
    pub gtol: Option<f64>,
    /// Stop ES-VQE and ADAPT-VQE once within 1 kcal/mol of the FCI energy.
    #[arg(long)]
    #[serde(default)]
    pub fci_target: bool,
    /// ADAPT-VQE stops when the score-vector 2-norm falls below this.
    #[arg(long)]
    pub grad_threshold: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Row output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Directory for one JSON-lines run trace per input.
    #[arg(long)]
    pub trace_dir: Option<PathBuf>,
    /// Record wall time. Off by default so repeated runs are byte-identical.
    #[arg(long)]
    #[serde(default)]
    pub timing: bool,
}

/// Fully resolved settings for one invocation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(skip)]
    pub fcidump: Vec<PathBuf>,
    pub method: Method,
    pub pool: PoolKind,
    pub pool_convention: Convention,
    pub eps_a: f64,
    pub eps_b: f64,
    pub eps_c: f64,
    pub opt_mode: Mode,
    pub gtol: f64,
    pub fci_target: bool,
    pub grad_threshold: f64,
    pub max_iter: Option<usize>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub trace_dir: Option<PathBuf>,
    #[serde(skip)]
    pub timing: bool,
}

impl RunArgs {
    /// Layers the command line over the config file (if any) over defaults.
    pub fn resolve(self) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => RunArgs::default(),
        };
        let base = |p: &Path| file.config.as_deref().and_then(Path::parent).map_or(p.to_path_buf(), |d| d.join(p));
        let fcidump =
            if self.fcidump.is_empty() { file.fcidump.iter().map(|p| base(p)).collect() } else { self.fcidump };
        let cfg = RunConfig {
            fcidump,
            method: self.method.or(file.method).unwrap_or(Method::EsVqe),
            pool: self.pool.or(file.pool).unwrap_or(PoolKind::Uccsd),
            pool_convention: self.pool_convention.or(file.pool_convention).unwrap_or(Convention::SpinAdapted),
            eps_a: self.eps_a.or(file.eps_a).unwrap_or(1e-4),
            eps_b: self.eps_b.or(file.eps_b).unwrap_or(1e-4),
            eps_c: self.eps_c.or(file.eps_c).unwrap_or(1e-8),
            opt_mode: self.opt_mode.or(file.opt_mode).unwrap_or(Mode::Full),
            gtol: self.gtol.or(file.gtol).unwrap_or(1e-7),
            fci_target: self.fci_target || file.fci_target,
            grad_threshold: self.grad_threshold.or(file.grad_threshold).unwrap_or(1e-2),
            max_iter: self.max_iter.or(file.max_iter),
            out: self.out.or(file.out),
            format: self.format.or(file.format).unwrap_or(Format::Csv),
            trace_dir: self.trace_dir.or(file.trace_dir),
            timing: self.timing || file.timing,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read_config(path: &Path) -> Result<RunArgs, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let mut args: RunArgs = toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    args.config = Some(path.to_path_buf());
    Ok(args)
}

impl RunConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.fcidump.is_empty() {
            return Err(ConfigError("no FCIDUMP input given".into()));
        }
        for (name, v) in [
            ("eps_a", self.eps_a),
            ("eps_b", self.eps_b),
            ("eps_c", self.eps_c),
            ("gtol", self.gtol),
            ("grad_threshold", self.grad_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError(format!("{name} must be a positive number, got {v}")));
            }
        }
        Ok(())
    }
}
