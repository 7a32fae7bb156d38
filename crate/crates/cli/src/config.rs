use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liouville_core::liouville_map::MAX_PARTIAL_ORDER;
use liouville_core::InitialData;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "liouville", version, about = "Cauchy problem for the Liouville equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump F and its partials on [-tmax, tmax] x [-alpha, alpha].
    Solve {
        /// Also write the fundamental solutions to <stem>.g2.csv and <stem>.g4.csv.
        #[arg(long, value_name = "PATH")]
        dump_ode: Option<PathBuf>,
    },
    /// Residual, Wronskians, positivity and the t = 0 identities.
    Verify,
    /// Restriction of the constructed field back to t = 0.
    Roundtrip,
    /// Distances along the family (2^-n f1, 2^-n f2) towards zero data.
    Converge,
    /// Derivative formulas for exp and log against a formal oracle.
    Fdb {
        #[command(subcommand)]
        action: FdbAction,
    },
    /// Finite-difference cross-check under step halving.
    Oracle,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum FdbAction {
    Verify {
        #[arg(long, default_value_t = 5)]
        max_order: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    pub f1: String,
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    pub f2: String,
    /// Mass parameter.
    #[arg(short = 'm', long = "mass", global = true, default_value_t = 2.0)]
    pub m: f64,
    /// Spatial half width of the sampled region.
    #[arg(long, global = true, default_value_t = 2)]
    pub alpha: u32,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tmax: f64,
    /// Grid points per unit length.
    #[arg(long, global = true, default_value_t = 50)]
    pub grid: usize,
    /// ODE tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Highest derivative order (solve: 0, converge: 3).
    #[arg(long, global = true)]
    pub jet_order: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

/// Invalid configuration; exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub f1: String,
    pub f2: String,
    pub m: f64,
    pub alpha: u32,
    pub tmax: f64,
    pub grid: usize,
    pub tol: f64,
    pub jet_order: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, ConfigError> {
        let c = &cli.common;
        let (command, default_format, default_order, max_order) = match cli.command {
            Command::Solve { .. } => ("solve", Format::Csv, 0, None),
            Command::Verify => ("verify", Format::Json, 2, None),
            Command::Roundtrip => ("roundtrip", Format::Json, 1, None),
            Command::Converge => ("converge", Format::Csv, 3, None),
            Command::Fdb { action: FdbAction::Verify { max_order } } => {
                ("fdb", Format::Csv, 0, Some(max_order))
            }
            Command::Oracle => ("oracle", Format::Json, 0, None),
        };
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError(format!("{name} must be a positive number, got {v}")))
            }
        };
        positive("-m", c.m)?;
        positive("--tmax", c.tmax)?;
        positive("--tol", c.tol)?;
        if c.alpha == 0 {
            return Err(ConfigError("--alpha must be at least 1".into()));
        }
        if c.grid == 0 {
            return Err(ConfigError("--grid must be at least 1".into()));
        }
        let jet_order = c.jet_order.unwrap_or(default_order);
        if jet_order > MAX_PARTIAL_ORDER {
            return Err(ConfigError(format!(
                "--jet-order {jet_order} exceeds the cap of {MAX_PARTIAL_ORDER}"
            )));
        }
        if max_order == Some(0) {
            return Err(ConfigError("--max-order must be at least 1".into()));
        }
        let cfg = RunConfig {
            command: command.to_string(),
            f1: c.f1.clone(),
            f2: c.f2.clone(),
            m: c.m,
            alpha: c.alpha,
            tmax: c.tmax,
            grid: c.grid,
            tol: c.tol,
            jet_order,
            out: c.out.clone(),
            format: c.format.unwrap_or(default_format),
            max_order,
        };
        cfg.data()?;
        Ok(cfg)
    }

    pub fn data(&self) -> Result<InitialData, ConfigError> {
        InitialData::parse(&self.f1, &self.f2, self.m).map_err(|e| ConfigError(e.to_string()))
    }

    /// Radius of the quartet covering the sampled region.
    pub fn radius(&self) -> f64 {
        f64::from(self.alpha) + self.tmax + 1.0
    }

    /// `i / grid` for `|i / grid| <= half_width`.
    pub fn nodes(&self, half_width: f64) -> Vec<f64> {
        let g = self.grid as f64;
        let k = (half_width * g + 1e-9).floor() as i64;
        (-k..=k).map(|i| i as f64 / g).collect()
    }
}
