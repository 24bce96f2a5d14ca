use hardy_ground::closed_form::{
    bubble_pair, ground_levels, mountain_pass_level, nu0, nu1, s_lambda, solve_kl, sobolev_constant,
    synchronized_amplitudes, synchronized_pair, KlRoots, MountainPass,
};
use hardy_ground::functional::energy;
use hardy_ground::minimize::{minimize_nehari_on, minimize_quotient, scan_on, SolveReport, StartRecord};
use hardy_ground::params::{critical_exponent, hardy_limit};
use hardy_ground::verify::{check_identities, check_limits, check_thresholds, CheckResult};
use hardy_ground::{EFGrid, StatePair, SystemParams};
use serde::Serialize;

use crate::config::{Command, RunConfig, Suite};
use crate::error::{CliError, EXIT_CHECKS_FAILED, EXIT_OK, EXIT_SOLVER};
use crate::output::GridInfo;

/// Result of one command: serializable payload plus tabular data.
pub struct Outcome {
    pub exit_code: i32,
    pub payload: serde_json::Value,
    pub grid: Option<GridInfo>,
    pub table_key: &'static str,
    pub table: Vec<(String, String, String)>,
    pub profile: Option<StatePair>,
    pub summary: Vec<String>,
}

impl Outcome {
    fn new(payload: impl Serialize) -> Result<Self, CliError> {
        Ok(Outcome {
            exit_code: EXIT_OK,
            payload: serde_json::to_value(payload)?,
            grid: None,
            table_key: "key",
            table: Vec::new(),
            profile: None,
            summary: Vec::new(),
        })
    }
}

fn grid_info(g: &EFGrid) -> GridInfo {
    GridInfo { half_width: g.half_width(), n: g.len(), h: g.spacing() }
}

fn row(k: impl ToString, q: &str, v: impl ToString) -> (String, String, String) {
    (k.to_string(), q.to_string(), v.to_string())
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Constants => constants(cfg),
        Command::Exact => exact(cfg),
        Command::Solve => solve(cfg),
        Command::Scan => scan_cmd(cfg),
        Command::MpLevel => mp_level(cfg),
        Command::Verify => verify(cfg),
    }
}

#[derive(Serialize)]
struct Constants {
    params: SystemParams,
    hardy_limit: f64,
    critical_exponent: f64,
    sobolev_constant: f64,
    s_lambda1: f64,
    s_lambda2: f64,
    m1: f64,
    m2: f64,
    nu0: f64,
    nu1: Option<f64>,
}

fn constants(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let n = p.dim();
    let (m1, m2) = ground_levels(&p);
    let c = Constants {
        params: p,
        hardy_limit: hardy_limit(n),
        critical_exponent: critical_exponent(n),
        sobolev_constant: sobolev_constant(n),
        s_lambda1: s_lambda(n, p.lambda1())?,
        s_lambda2: s_lambda(n, p.lambda2())?,
        m1,
        m2,
        nu0: nu0(n, p.lambda1(), p.lambda2())?,
        nu1: if n == 4 { Some(nu1(p.lambda1(), p.lambda2())?) } else { None },
    };
    let mut table = vec![
        row("Lambda_N", "value", c.hardy_limit),
        row("2*", "value", c.critical_exponent),
        row("S", "value", c.sobolev_constant),
        row("S(lambda1)", "value", c.s_lambda1),
        row("S(lambda2)", "value", c.s_lambda2),
        row("nu0", "value", c.nu0),
        row("M1", "value", m1),
        row("M2", "value", m2),
    ];
    if let Some(v) = c.nu1 {
        table.insert(6, row("nu1", "value", v));
    }
    let summary = table.iter().map(|(k, _, v)| format!("{k:<12} {v}")).collect();
    let mut out = Outcome::new(&c)?;
    out.table_key = "constant";
    out.table = table;
    out.summary = summary;
    Ok(out)
}

#[derive(Serialize)]
struct Exact {
    params: SystemParams,
    amplitudes: (f64, f64),
    theta: Option<f64>,
    energy: f64,
    closed_form_energy: Option<f64>,
    kl: Option<KlRoots>,
}

fn exact(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let g = cfg.grid(&p)?;
    let amplitudes = synchronized_amplitudes(&p, cfg.theta)?;
    let pair = synchronized_pair(&p, &g, cfg.theta)?;
    let e = energy(&p, &pair)?.total;
    let closed = (p.dim() == 4).then(|| {
        let s = s_lambda(4, p.lambda1()).expect("validated");
        if (p.nu() - 0.5).abs() < 1e-12 {
            s * s / 4.0
        } else {
            s * s / (2.0 * (1.0 + 2.0 * p.nu()))
        }
    });
    let kl = if p.dim() >= 5 { Some(solve_kl(p.dim(), p.nu())?) } else { None };
    let x = Exact { params: p, amplitudes, theta: cfg.theta, energy: e, closed_form_energy: closed, kl };
    let mut out = Outcome::new(&x)?;
    out.grid = Some(grid_info(&g));
    out.table_key = "state";
    out.table = vec![
        row("synchronized", "amplitude1", amplitudes.0),
        row("synchronized", "amplitude2", amplitudes.1),
        row("synchronized", "energy", e),
    ];
    if let Some(c) = closed {
        out.table.push(row("synchronized", "closed_form_energy", c));
    }
    out.summary = out.table.iter().map(|(_, q, v)| format!("{q:<20} {v}")).collect();
    out.profile = Some(pair);
    Ok(out)
}

fn solve_report_rows(key: f64, r: &SolveReport) -> Vec<(String, String, String)> {
    vec![
        row(key, "energy", r.energy),
        row(key, "classification", format!("{:?}", r.classification)),
        row(key, "grad_norm", r.grad_norm),
        row(key, "iterations", r.iterations),
        row(key, "stop_reason", format!("{:?}", r.stop_reason)),
        row(key, "separation", r.separation),
        row(key, "residual1", r.nehari_residuals.0),
        row(key, "residual2", r.nehari_residuals.1),
    ]
}

#[derive(Serialize)]
struct Solve<'a> {
    params: SystemParams,
    m1: f64,
    m2: f64,
    report: &'a SolveReport,
}

fn solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let g = cfg.grid(&p)?;
    let r = if cfg.quotient {
        minimize_quotient(&p, &bubble_pair(&p, &g, 0.0)?, &cfg.solver)?
    } else {
        minimize_nehari_on(&p, &g, &cfg.solver)?
    };
    let (m1, m2) = ground_levels(&p);
    let mut out = Outcome::new(Solve { params: p, m1, m2, report: &r })?;
    out.grid = Some(grid_info(&g));
    out.table_key = "nu";
    out.table = solve_report_rows(p.nu(), &r);
    out.summary = vec![
        format!("energy         {}", r.energy),
        format!("classification {:?}", r.classification),
        format!("stop           {:?} after {} iterations", r.stop_reason, r.iterations),
        format!("M1, M2         {m1}, {m2}"),
    ];
    if !r.settled() {
        out.exit_code = EXIT_SOLVER;
    }
    out.profile = Some(r.state);
    Ok(out)
}

#[derive(Serialize)]
struct ScanRow {
    nu: f64,
    report: Option<SolveReport>,
    error: Option<String>,
}

#[derive(Serialize)]
struct ScanOut {
    params: SystemParams,
    m1: f64,
    m2: f64,
    entries: Vec<ScanRow>,
    starts: Vec<Vec<StartRecord>>,
}

fn scan_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let g = cfg.grid(&p)?;
    let entries = scan_on(&p, &g, &cfg.scan.nu_list, &cfg.solver)?;
    let (m1, m2) = ground_levels(&p);
    let mut table = Vec::new();
    let mut failed = false;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for e in entries {
        match e.outcome {
            Ok(r) => {
                failed |= !r.settled();
                table.extend(solve_report_rows(e.nu, &r));
                summary.push(format!("nu = {:<10} energy = {} ({:?})", e.nu, r.energy, r.classification));
                rows.push(ScanRow { nu: e.nu, report: Some(r), error: None });
            }
            Err(err) => {
                failed = true;
                table.push(row(e.nu, "error", &err));
                summary.push(format!("nu = {:<10} error: {err}", e.nu));
                rows.push(ScanRow { nu: e.nu, report: None, error: Some(err.to_string()) });
            }
        }
    }
    let starts = rows.iter().map(|r| r.report.as_ref().map(|x| x.starts.clone()).unwrap_or_default()).collect();
    let mut out = Outcome::new(ScanOut { params: p, m1, m2, entries: rows, starts })?;
    out.grid = Some(grid_info(&g));
    out.table_key = "nu";
    out.table = table;
    out.summary = summary;
    if failed {
        out.exit_code = EXIT_SOLVER;
    }
    Ok(out)
}

#[derive(Serialize)]
struct MpOut {
    params: SystemParams,
    m1: f64,
    m2: f64,
    mountain_pass: MountainPass,
}

fn mp_level(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let g = cfg.grid(&p)?;
    let mp = mountain_pass_level(&p, &g, cfg.resolution)?;
    let (m1, m2) = ground_levels(&p);
    let mut out = Outcome::new(MpOut { params: p, m1, m2, mountain_pass: mp })?;
    out.grid = Some(grid_info(&g));
    out.table_key = "nu";
    out.table = vec![
        row(p.nu(), "d_nu", mp.level),
        row(p.nu(), "t", mp.t),
        row(p.nu(), "s", mp.s),
        row(p.nu(), "t1", mp.t1),
        row(p.nu(), "M1+M2", m1 + m2),
    ];
    out.summary = vec![format!("d_nu = {} at (t, s) = ({}, {}); M1 + M2 = {}", mp.level, mp.t, mp.s, m1 + m2)];
    Ok(out)
}

fn identity_suite() -> Result<Vec<CheckResult>, CliError> {
    let mut all = Vec::new();
    for dim in [3usize, 4, 5, 6] {
        let lim = hardy_limit(dim);
        all.extend(check_identities(&[dim], &[0.0, 0.4 * lim, 0.8 * lim])?);
    }
    Ok(all)
}

fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut checks = Vec::new();
    let wants = |s: Suite| cfg.suite == s || cfg.suite == Suite::All;
    if wants(Suite::Identities) {
        checks.extend(identity_suite()?);
    }
    if wants(Suite::Thresholds) {
        checks.extend(check_thresholds(&cfg.params()?, &cfg.solver)?);
    }
    if wants(Suite::Limits) {
        checks.extend(check_limits(&cfg.params()?, &cfg.scan.nu_list, &cfg.solver)?);
    }
    let passed = checks.iter().all(|c| c.passed);
    let table = checks
        .iter()
        .flat_map(|c| {
            [
                row(&c.name, "claimed", c.claimed),
                row(&c.name, "computed", c.computed),
                row(&c.name, "tolerance", c.tolerance),
                row(&c.name, "passed", c.passed),
            ]
        })
        .collect();
    let summary = checks
        .iter()
        .map(|c| format!("{} {} (computed {}, claimed {})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.computed, c.claimed))
        .collect();
    let mut out = Outcome::new(&checks)?;
    out.table_key = "check";
    out.table = table;
    out.summary = summary;
    if !passed {
        out.exit_code = EXIT_CHECKS_FAILED;
    }
    Ok(out)
}

