//! Parameter resolution: command-line flags, then the JSON config, then defaults.

use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use josephson_core::{JunctionParams, PlateParams};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_EPSILON: f64 = 0.25;
pub const DEFAULT_BETA: f64 = 4.0;
pub const DEFAULT_GAMMA: f64 = 0.5;

#[derive(Debug, Clone, Default, Args)]
pub struct JunctionArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon_i: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon_ii: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_i: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_ii: Option<f64>,
    /// Junction coupling γ ≥ 0.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Bulk phase of plate I.
    #[arg(long, allow_negative_numbers = true)]
    pub phi_i: Option<f64>,
    /// Bulk phase of plate II.
    #[arg(long, allow_negative_numbers = true)]
    pub phi_ii: Option<f64>,
    /// JSON file with any of the junction and sweep keys; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub epsilon_i: Option<f64>,
    pub epsilon_ii: Option<f64>,
    pub beta_i: Option<f64>,
    pub beta_ii: Option<f64>,
    pub gamma: Option<f64>,
    pub phi_i: Option<f64>,
    pub phi_ii: Option<f64>,
    pub sweep: Option<SweepSection>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

impl JunctionArgs {
    pub fn file_config(&self) -> Result<FileConfig, CliError> {
        match &self.config {
            Some(path) => FileConfig::load(path),
            None => Ok(FileConfig::default()),
        }
    }

    pub fn resolve(&self, file: &FileConfig) -> Result<JunctionParams, CliError> {
        let pick =
            |flag: Option<f64>, key: Option<f64>, default: f64| flag.or(key).unwrap_or(default);
        let plate_i = PlateParams::new(
            pick(self.epsilon_i, file.epsilon_i, DEFAULT_EPSILON),
            pick(self.beta_i, file.beta_i, DEFAULT_BETA),
        )?;
        let plate_ii = PlateParams::new(
            pick(self.epsilon_ii, file.epsilon_ii, DEFAULT_EPSILON),
            pick(self.beta_ii, file.beta_ii, DEFAULT_BETA),
        )?;
        Ok(JunctionParams::new(
            plate_i,
            plate_ii,
            pick(self.gamma, file.gamma, DEFAULT_GAMMA),
            pick(self.phi_i, file.phi_i, 0.0),
            pick(self.phi_ii, file.phi_ii, 0.0),
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// `φ_II − φ_I`, keeping `φ_I` fixed.
    DeltaPhi,
    Gamma,
    /// Inverse temperature of both plates.
    Beta,
    /// Single-site energy of both plates.
    Epsilon,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::DeltaPhi => "delta_phi",
            SweepVariable::Gamma => "gamma",
            SweepVariable::Beta => "beta",
            SweepVariable::Epsilon => "epsilon",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "delta_phi" => Ok(SweepVariable::DeltaPhi),
            "gamma" => Ok(SweepVariable::Gamma),
            "beta" => Ok(SweepVariable::Beta),
            "epsilon" => Ok(SweepVariable::Epsilon),
            other => Err(format!(
                "unknown sweep variable '{other}' (expected delta_phi, gamma, beta or epsilon)"
            )),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// One of delta_phi, gamma, beta, epsilon.
    #[arg(long)]
    pub variable: Option<SweepVariable>,
    #[arg(long, allow_negative_numbers = true)]
    pub start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: Option<f64>,
    /// Number of sweep points (≥ 2).
    #[arg(long)]
    pub count: Option<usize>,
    /// CSV destination; standard output if absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub junction: JunctionParams,
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn resolve(junction: &JunctionArgs, sweep: &SweepArgs) -> Result<Self, CliError> {
        let file = junction.file_config()?;
        let section = file.sweep.clone().unwrap_or_default();
        let variable = match (sweep.variable, &section.variable) {
            (Some(v), _) => v,
            (None, Some(name)) => name.parse().map_err(CliError::Usage)?,
            (None, None) => SweepVariable::DeltaPhi,
        };
        let (default_start, default_stop) = match variable {
            SweepVariable::DeltaPhi => (0.0, TAU),
            SweepVariable::Gamma => (0.0, 1.0),
            SweepVariable::Beta => (1.0, 20.0),
            SweepVariable::Epsilon => (0.01, 0.49),
        };
        let config = Self {
            junction: junction.resolve(&file)?,
            variable,
            start: sweep.start.or(section.start).unwrap_or(default_start),
            stop: sweep.stop.or(section.stop).unwrap_or(default_stop),
            count: sweep.count.or(section.count).unwrap_or(64),
            output: sweep.output.clone().or(file.output),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(CliError::Usage(format!(
                "sweep count must be >= 2, got {}",
                self.count
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(CliError::Usage(format!(
                "sweep range needs finite start < stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        for x in [self.start, self.stop] {
            self.params_at(x)?;
        }
        Ok(())
    }

    /// Sweep values. The phase grid is half-open, `[start, stop)`, so a full
    /// period does not repeat its first point; the others include `stop`.
    pub fn points(&self) -> Vec<f64> {
        let intervals = match self.variable {
            SweepVariable::DeltaPhi => self.count,
            _ => self.count - 1,
        };
        let width = self.stop - self.start;
        (0..self.count)
            .map(|k| self.start + width * k as f64 / intervals as f64)
            .collect()
    }

    pub fn params_at(&self, x: f64) -> Result<JunctionParams, CliError> {
        let j = self.junction;
        let p = match self.variable {
            SweepVariable::DeltaPhi => j.with_phases(j.phi_i(), j.phi_i() + x)?,
            SweepVariable::Gamma => j.with_gamma(x)?,
            SweepVariable::Beta => JunctionParams::new(
                PlateParams::new(j.plate_i.epsilon(), x)?,
                PlateParams::new(j.plate_ii.epsilon(), x)?,
                j.gamma(),
                j.phi_i(),
                j.phi_ii(),
            )?,
            SweepVariable::Epsilon => JunctionParams::new(
                PlateParams::new(x, j.plate_i.beta())?,
                PlateParams::new(x, j.plate_ii.beta())?,
                j.gamma(),
                j.phi_i(),
                j.phi_ii(),
            )?,
        };
        Ok(p)
    }
}
