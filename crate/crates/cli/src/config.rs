//! Run configuration: defaults, overlaid by a TOML (or JSON) file, overlaid
//! by command-line flags.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use hardy_ground::minimize::SolveOptions;
use hardy_ground::params::critical_exponent;
use hardy_ground::{make_grid, make_params, EFGrid, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constants,
    Exact,
    Solve,
    Scan,
    MpLevel,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    Thresholds,
    Limits,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsBlock {
    #[serde(rename = "N")]
    pub dim: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Defaults to `2*/2`.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub nu: f64,
}

impl Default for ParamsBlock {
    fn default() -> Self {
        ParamsBlock { dim: 4, lambda1: 0.5, lambda2: 0.5, alpha: None, beta: None, nu: 1.0 }
    }
}

/// Grid override; both empty means the automatic grid for the parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridBlock {
    #[serde(rename = "L")]
    pub half_width: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanBlock {
    pub nu_list: Vec<f64>,
}

impl Default for ScanBlock {
    fn default() -> Self {
        ScanBlock { nu_list: vec![0.2, 0.1, 0.05] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: PathBuf,
    /// Maximum number of rows in the profile table.
    pub profile_rows: usize,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { dir: PathBuf::from("hardy-ground-out"), profile_rows: 2001 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub params: ParamsBlock,
    pub grid: GridBlock,
    pub solver: SolveOptions,
    /// `solve` minimizes the one-constraint quotient instead of the Nehari
    /// energy.
    pub quotient: bool,
    pub scan: ScanBlock,
    pub suite: Suite,
    /// Angle of the degenerate synchronized family for `exact`.
    pub theta: Option<f64>,
    pub resolution: usize,
    pub workers: Option<usize>,
    pub output: OutputBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            params: ParamsBlock::default(),
            grid: GridBlock::default(),
            solver: SolveOptions::default(),
            quotient: false,
            scan: ScanBlock::default(),
            suite: Suite::All,
            theta: None,
            resolution: hardy_ground::closed_form::DEFAULT_MP_RESOLUTION,
            workers: None,
            output: OutputBlock::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }

    pub fn params(&self) -> Result<SystemParams, CliError> {
        let b = &self.params;
        let half = critical_exponent(b.dim.max(3)) / 2.0;
        Ok(make_params(b.dim, b.lambda1, b.lambda2, b.alpha.unwrap_or(half), b.beta.unwrap_or(half), b.nu)?)
    }

    pub fn grid(&self, p: &SystemParams) -> Result<Arc<EFGrid>, CliError> {
        let auto = EFGrid::for_params(p);
        Ok(match (self.grid.half_width, self.grid.n) {
            (None, None) => auto,
            (Some(l), Some(n)) => make_grid(l, n)?,
            (Some(l), None) => {
                let cells = (l / auto.spacing()).round().max(1.0) as usize;
                make_grid(l, 2 * cells + 1)?
            }
            (None, Some(n)) => make_grid(auto.half_width(), n)?,
        }
        .shared())
    }
}
