//! `hardy-ground`: batch front-end for the coupled critical Hardy system.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{Command, RunConfig, Suite};
use error::CliError;
use output::Artifacts;

const WORKERS_ENV: &str = "HARDY_GROUND_WORKERS";

#[derive(Parser)]
#[command(name = "hardy-ground", version, about = "Ground states of coupled critical Schrödinger systems with Hardy potentials")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hardy limit, Sobolev constants, coupling thresholds and ground levels.
    Constants,
    /// Synchronized closed-form state (and k-l roots for N >= 5).
    Exact {
        /// Angle of the degenerate family at N = 4, nu = 1/2.
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Least-energy solve on the Nehari set.
    Solve {
        /// Minimize the one-constraint quotient instead.
        #[arg(long)]
        quotient: bool,
    },
    /// Independent solves over a list of couplings.
    Scan {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        nu_list: Option<Vec<f64>>,
    },
    /// Mountain-pass level over the two-bubble rectangle.
    MpLevel {
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long, value_delimiter = ',')]
        nu_list: Option<Vec<f64>>,
    },
    /// Run the command named in the config file.
    Run,
}

#[derive(Args)]
struct Common {
    /// TOML (or .json) config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long = "N", global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    lambda1: Option<f64>,
    #[arg(long, global = true)]
    lambda2: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    nu: Option<f64>,
    /// Grid half-width.
    #[arg(long = "L", global = true)]
    half_width: Option<f64>,
    /// Grid points.
    #[arg(long = "n", global = true)]
    points: Option<usize>,
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    #[arg(long, global = true)]
    grad_tol: Option<f64>,
    /// Initial separations of the two-bubble starts.
    #[arg(long, global = true, value_delimiter = ',')]
    separations: Option<Vec<f64>>,
    /// Worker threads (default: hardware threads, or $HARDY_GROUND_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory for report.json, table.csv and profile.csv.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

fn resolve(cli: &Cli) -> Result<(Command, RunConfig), CliError> {
    let mut cfg = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let c = &cli.common;
    let set = |dst: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *dst = v;
        }
    };
    if let Some(n) = c.dim {
        cfg.params.dim = n;
    }
    set(&mut cfg.params.lambda1, c.lambda1);
    set(&mut cfg.params.lambda2, c.lambda2);
    set(&mut cfg.params.nu, c.nu);
    cfg.params.alpha = c.alpha.or(cfg.params.alpha);
    cfg.params.beta = c.beta.or(cfg.params.beta);
    cfg.grid.half_width = c.half_width.or(cfg.grid.half_width);
    cfg.grid.n = c.points.or(cfg.grid.n);
    if let Some(v) = c.max_iters {
        cfg.solver.max_iters = v;
    }
    set(&mut cfg.solver.grad_tol, c.grad_tol);
    if let Some(v) = &c.separations {
        cfg.solver.separations = v.clone();
    }
    cfg.workers = c.workers.or(cfg.workers);
    if let Some(o) = &c.out {
        cfg.output.dir = o.clone();
    }

    let command = match &cli.command {
        Cmd::Constants => Command::Constants,
        Cmd::Exact { theta } => {
            cfg.theta = theta.or(cfg.theta);
            Command::Exact
        }
        Cmd::Solve { quotient } => {
            cfg.quotient |= *quotient;
            Command::Solve
        }
        Cmd::Scan { nu_list } => {
            if let Some(v) = nu_list {
                cfg.scan.nu_list = v.clone();
            }
            Command::Scan
        }
        Cmd::MpLevel { resolution } => {
            if let Some(r) = resolution {
                cfg.resolution = *r;
            }
            Command::MpLevel
        }
        Cmd::Verify { suite, nu_list } => {
            if let Some(s) = suite {
                cfg.suite = *s;
            }
            if let Some(v) = nu_list {
                cfg.scan.nu_list = v.clone();
            }
            Command::Verify
        }
        Cmd::Run => cfg.command.ok_or_else(|| CliError::Config("config file names no command".into()))?,
    };
    cfg.command = Some(command);
    cfg.solver.validate()?;
    Ok((command, cfg))
}

fn workers(cfg: &RunConfig) -> Result<Option<usize>, CliError> {
    if let Some(n) = cfg.workers {
        return Ok(Some(n));
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let start = Instant::now();
    let (command, cfg) = resolve(cli)?;
    if let Some(n) = workers(&cfg)? {
        if n == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    }
    let name = serde_json::to_value(command)?.as_str().unwrap_or("run").to_string();
    let artifacts = Artifacts::new(&cfg.output.dir)?;
    let out = match commands::run(command, &cfg) {
        Ok(out) => out,
        Err(e) => {
            // partial artifact: the report records the configuration and the failure
            let payload = serde_json::json!({ "error": e.to_string() });
            artifacts.report(&name, &cfg, None, start.elapsed().as_secs_f64(), e.exit_code(), &payload)?;
            return Err(e);
        }
    };
    if let Some(state) = &out.profile {
        artifacts.profile(state, cfg.output.profile_rows)?;
    }
    artifacts.table(out.table_key, &out.table)?;
    let report =
        artifacts.report(&name, &cfg, out.grid.as_ref(), start.elapsed().as_secs_f64(), out.exit_code, &out.payload)?;
    for line in &out.summary {
        println!("{line}");
    }
    println!("report: {}", report.display());
    Ok(out.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("hardy-ground: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
