//! Report and table writers.

use std::fs;
use std::path::{Path, PathBuf};

use hardy_ground::StatePair;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Serialize)]
pub struct GridInfo {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
    pub h: f64,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    wall_time_s: f64,
    exit_code: i32,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<&'a GridInfo>,
    result: &'a T,
}

pub struct Artifacts {
    pub dir: PathBuf,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Artifacts { dir: dir.to_path_buf() })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn report<T: Serialize>(
        &self,
        command: &str,
        config: &RunConfig,
        grid: Option<&GridInfo>,
        wall_time_s: f64,
        exit_code: i32,
        result: &T,
    ) -> Result<PathBuf, CliError> {
        let path = self.dir.join("report.json");
        let r = Report {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            wall_time_s,
            exit_code,
            config,
            grid,
            result,
        };
        fs::write(&path, serde_json::to_string_pretty(&r)? + "\n")?;
        // the resolved configuration alone, for `run --config config.json`
        fs::write(self.dir.join("config.json"), serde_json::to_string_pretty(config)? + "\n")?;
        Ok(path)
    }

    /// Long-format table: one row per `(key, quantity)`.
    pub fn table(&self, key: &str, rows: &[(String, String, String)]) -> Result<PathBuf, CliError> {
        let path = self.dir.join("table.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record([key, "quantity", "value"])?;
        for (k, q, v) in rows {
            w.write_record([k, q, v])?;
        }
        w.flush()?;
        Ok(path)
    }

    /// `s, w1, w2` columns, subsampled to at most `max_rows` rows.
    pub fn profile(&self, state: &StatePair, max_rows: usize) -> Result<PathBuf, CliError> {
        let path = self.dir.join("profile.csv");
        let grid = state.grid();
        let stride = grid.len().div_ceil(max_rows.max(2)).max(1);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["s", "w1", "w2"])?;
        let (a, b) = (state.w1.values(), state.w2.values());
        for (j, s) in grid.points().enumerate() {
            if j % stride == 0 || j == grid.len() - 1 {
                w.write_record([s.to_string(), a[j].to_string(), b[j].to_string()])?;
            }
        }
        w.flush()?;
        Ok(path)
    }
}
