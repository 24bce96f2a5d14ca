//! Constrained minimization of the energy: over `N′_ν` (one common
//! multiplier, the level `c′_ν`) and over `N_ν` (two multipliers, the level
//! `c_ν`), with recentering and detection of semitrivial and dichotomizing
//! outcomes.
//!
//! Each iteration takes a gradient step preconditioned by the quadratic part
//! `ω(−d²/ds² + μ_i²)` of the energy, clamps at zero, projects back onto the
//! constraint set and accepts by backtracking Armijo search. The trial step
//! is the Barzilai–Borwein estimate from the previous iteration.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::bubble_pair;
use crate::error::{Error, Result};
use crate::functional::{energy, gradient, hardy_norm_sq, inner};
use crate::grid::{sphere_area, EFGrid};
use crate::nehari::{project_pair_with, single_multiplier};
use crate::params::SystemParams;
use crate::profile::{Profile, StatePair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Tolerance on the dual norm `sqrt(⟨g, P⁻¹g⟩)` of the gradient.
    pub grad_tol: f64,
    /// Trial step of the first iteration.
    pub initial_step: f64,
    /// Step reduction factor on rejection.
    pub backtrack: f64,
    /// Sufficient-decrease constant.
    pub armijo: f64,
    pub max_backtracks: usize,
    pub recenter: bool,
    /// Initial separations of two-bubble starts (the synchronized start is
    /// always included).
    pub separations: Vec<f64>,
    /// Component separation above which a run counts as dichotomizing;
    /// `None` means `0.6 L`.
    pub dichotomy_threshold: Option<f64>,
    /// Energy stall: stop when the energy drops by less than `stall_tol`
    /// over `stall_window` iterations.
    pub stall_window: usize,
    pub stall_tol: f64,
    /// Norm ratio below which the smaller component counts as vanished.
    pub semitrivial_ratio: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: 1500,
            grad_tol: 1e-6,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            max_backtracks: 40,
            recenter: true,
            separations: vec![4.0, 8.0, 12.0, 16.0, 20.0],
            dichotomy_threshold: None,
            stall_window: 50,
            stall_tol: 1e-12,
            semitrivial_ratio: 1e-6,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidOptions("max_iters must be at least 1".into()));
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidOptions("grad_tol must be positive".into()));
        }
        if !(self.initial_step > 0.0) || !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidOptions("step policy needs initial_step > 0 and backtrack in (0, 1)".into()));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(Error::InvalidOptions("armijo must lie in (0, 1)".into()));
        }
        if self.separations.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidOptions("separations must be finite and non-negative".into()));
        }
        Ok(())
    }

    fn threshold(&self, grid: &EFGrid) -> f64 {
        self.dichotomy_threshold.unwrap_or(0.6 * grid.half_width())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Coupled,
    /// Only the first component survives: `(u, 0)`.
    SemitrivialFirst,
    /// Only the second component survives: `(0, v)`.
    SemitrivialSecond,
    Dichotomizing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    GradTol,
    EnergyStall,
    MaxIters,
    /// No step length passed the sufficient-decrease test: the predicted
    /// decrease is below the rounding level of the energy.
    LineSearch,
}

/// Outcome of one multistart run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    pub index: usize,
    pub separation: f64,
    pub energy: Option<f64>,
    pub classification: Option<Classification>,
    pub iterations: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub state: StatePair,
    pub energy: f64,
    pub classification: Classification,
    pub nehari_residuals: (f64, f64),
    pub grad_norm: f64,
    pub iterations: usize,
    /// Gradient tolerance reached.
    pub converged: bool,
    pub stop_reason: StopReason,
    /// `|argmax w₁ − argmax w₂|` in `s`.
    pub separation: f64,
    pub boundary_defect: f64,
    /// Angle `θ` of `(sin θ w, cos θ w)` for the degenerate family at `ν = 1/2`.
    pub theta: Option<f64>,
    /// Accepted energies, starting with the projected initial state.
    pub energy_trace: Vec<f64>,
    /// Multistart bookkeeping; empty for single runs.
    pub starts: Vec<StartRecord>,
    /// Index of the chosen start.
    pub start_index: usize,
}

impl SolveReport {
    /// Stopped for any reason other than the iteration cap.
    pub fn settled(&self) -> bool {
        self.stop_reason != StopReason::MaxIters
    }
}

/// Inverse of `ω(−D² + μ²)` (three-point, Dirichlet) for both components.
struct Preconditioner {
    factors: [Vec<f64>; 2],
    diag: [f64; 2],
    off: f64,
    omega: f64,
}

impl Preconditioner {
    fn new(p: &SystemParams, grid: &EFGrid) -> Self {
        let h = grid.spacing();
        let off = -1.0 / (h * h);
        let m = grid.len() - 2;
        let build = |mu2: f64| {
            let b = 2.0 / (h * h) + mu2;
            // Thomas: c'_i = off / (b − off c'_{i−1})
            let mut c = vec![0.0; m];
            let mut prev = 0.0;
            for ci in c.iter_mut() {
                *ci = off / (b - off * prev);
                prev = *ci;
            }
            (c, b)
        };
        let (c1, b1) = build(p.mu1().powi(2));
        let (c2, b2) = build(p.mu2().powi(2));
        Preconditioner { factors: [c1, c2], diag: [b1, b2], off, omega: sphere_area(p.dim()) }
    }

    fn solve_one(&self, which: usize, g: &[f64]) -> Vec<f64> {
        let n = g.len();
        let m = n - 2;
        let c = &self.factors[which];
        let b = self.diag[which];
        let mut d = vec![0.0; m];
        let mut prev_c = 0.0;
        let mut prev_d = 0.0;
        for i in 0..m {
            let denom = b - self.off * prev_c;
            d[i] = (g[i + 1] / self.omega - self.off * prev_d) / denom;
            prev_c = c[i];
            prev_d = d[i];
        }
        for i in (0..m.saturating_sub(1)).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        let mut out = vec![0.0; n];
        out[1..n - 1].copy_from_slice(&d);
        out
    }

    fn apply(&self, g: &StatePair) -> Result<StatePair> {
        let grid = g.grid().clone();
        StatePair::new(
            Profile::new(grid.clone(), self.solve_one(0, g.w1.values()))?,
            Profile::new(grid, self.solve_one(1, g.w2.values()))?,
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Constraint {
    /// `N′_ν`
    Single,
    /// `N_ν`
    Pair,
}

fn project(p: &SystemParams, c: Constraint, pair: &StatePair) -> Result<(StatePair, f64)> {
    let e = energy(p, pair)?;
    let (t, s) = match c {
        Constraint::Single => {
            let t = single_multiplier(p, &e)?;
            (t, t)
        }
        Constraint::Pair => {
            let sc = project_pair_with(p, &e)?;
            (sc.t, sc.s)
        }
    };
    Ok((pair.scaled(t, s), e.scaled_total(p, t, s)))
}

fn clamp_nonneg(pair: &mut StatePair) {
    for w in [&mut pair.w1, &mut pair.w2] {
        let v = w.values_mut();
        let n = v.len();
        for x in v.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        v[0] = 0.0;
        v[n - 1] = 0.0;
    }
}

fn axpy(x: &StatePair, a: f64, d: &StatePair) -> StatePair {
    let comb = |u: &Profile, v: &Profile| {
        let vals = u.values().iter().zip(v.values()).map(|(p, q)| p + a * q).collect();
        Profile::new(u.grid().clone(), vals).expect("finite")
    };
    StatePair { w1: comb(&x.w1, &d.w1), w2: comb(&x.w2, &d.w2) }
}

fn diff(x: &StatePair, y: &StatePair) -> StatePair {
    axpy(x, -1.0, y)
}

/// Integer shift that puts the mass center of `w₁² + w₂²` at `s = 0`.
fn recenter_shift(pair: &StatePair) -> isize {
    let g = pair.grid();
    let (mut m0, mut m1) = (0.0, 0.0);
    for (j, (a, b)) in pair.w1.values().iter().zip(pair.w2.values()).enumerate() {
        let w = a * a + b * b;
        m0 += w;
        m1 += w * j as f64;
    }
    if m0 == 0.0 {
        return 0;
    }
    g.mid() as isize - (m1 / m0).round() as isize
}

fn vanished(p: &SystemParams, pair: &StatePair, ratio: f64) -> Option<Classification> {
    let n1 = hardy_norm_sq(p.dim(), p.lambda1(), &pair.w1).max(0.0).sqrt();
    let n2 = hardy_norm_sq(p.dim(), p.lambda2(), &pair.w2).max(0.0).sqrt();
    let big = n1.max(n2);
    if big == 0.0 {
        return None;
    }
    if n2 < ratio * big {
        Some(Classification::SemitrivialFirst)
    } else if n1 < ratio * big {
        Some(Classification::SemitrivialSecond)
    } else {
        None
    }
}

fn degenerate_family(p: &SystemParams) -> bool {
    p.dim() == 4 && p.lambda1() == p.lambda2() && p.alpha() == 2.0 && p.beta() == 2.0 && (p.nu() - 0.5).abs() < 1e-12
}

fn descend(p: &SystemParams, init: &StatePair, c: Constraint, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    if init.is_zero() {
        return Err(Error::ZeroProfile);
    }
    let grid = init.grid().clone();
    let pre = Preconditioner::new(p, &grid);
    let mut start = init.clone();
    clamp_nonneg(&mut start);
    let (mut x, mut e) = project(p, c, &start)?;
    let mut trace = vec![e];
    let mut step = opts.initial_step;
    let mut last: Option<(StatePair, StatePair)> = None; // (x, g) of the previous iterate
    let mut stop = StopReason::MaxIters;
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;

    for it in 0..opts.max_iters {
        iterations = it;
        let g = gradient(p, &x)?;
        let d = pre.apply(&g)?;
        let gd = inner(&g, &d);
        grad_norm = gd.max(0.0).sqrt();
        if grad_norm < opts.grad_tol {
            stop = StopReason::GradTol;
            break;
        }
        if trace.len() > opts.stall_window {
            let old = trace[trace.len() - 1 - opts.stall_window];
            if old - e < opts.stall_tol {
                stop = StopReason::EnergyStall;
                break;
            }
        }
        // Barzilai–Borwein trial in the preconditioned metric
        if let Some((xp, gp)) = &last {
            let dx = diff(&x, xp);
            let dg = diff(&g, gp);
            let dgd = pre.apply(&dg)?;
            let num = inner(&dx, &dg);
            let den = inner(&dg, &dgd);
            if num > 0.0 && den > 0.0 {
                step = (num / den).clamp(1e-4, 1e4);
            }
        }
        let mut accepted = None;
        let mut tau = step;
        for _ in 0..opts.max_backtracks {
            let mut y = axpy(&x, -tau, &d);
            clamp_nonneg(&mut y);
            if let Ok((y, ey)) = project(p, c, &y) {
                if ey <= e - opts.armijo * tau * gd {
                    accepted = Some((y, ey));
                    break;
                }
            }
            tau *= opts.backtrack;
        }
        let Some((mut y, mut ey)) = accepted else {
            stop = StopReason::LineSearch;
            break;
        };
        debug_assert!(ey <= e);
        last = Some((x, g));
        step = tau;

        if c == Constraint::Single {
            if let Some(which) = vanished(p, &y, opts.semitrivial_ratio) {
                let dead = match which {
                    Classification::SemitrivialFirst => &mut y.w2,
                    _ => &mut y.w1,
                };
                if !dead.is_zero() {
                    *dead = Profile::zeros(grid.clone());
                    let (yy, eyy) = project(p, c, &y)?;
                    y = yy;
                    ey = eyy;
                    last = None;
                }
            }
        }
        if opts.recenter {
            let k = recenter_shift(&y);
            if k != 0 {
                let moved = y.shifted(k);
                let em = energy(p, &moved)?.total;
                // the shift only moves mass across the truncation edge; keep
                // the trace monotone by refusing a shift that costs energy
                if em <= ey {
                    y = moved;
                    ey = em;
                    last = None;
                }
            }
        }
        x = y;
        e = ey;
        trace.push(e);
        iterations = it + 1;
    }

    let eb = energy(p, &x)?;
    let separation = x.separation();
    let classification = vanished(p, &x, opts.semitrivial_ratio).unwrap_or_else(|| {
        let decreased = trace.last() < trace.first();
        if separation > opts.threshold(&grid) && decreased {
            Classification::Dichotomizing
        } else {
            Classification::Coupled
        }
    });
    let theta = degenerate_family(p).then(|| x.w1.l2_norm().atan2(x.w2.l2_norm()));
    Ok(SolveReport {
        energy: eb.total,
        classification,
        nehari_residuals: eb.residuals(p),
        grad_norm,
        iterations,
        converged: stop == StopReason::GradTol,
        stop_reason: stop,
        separation,
        boundary_defect: x.boundary_defect(),
        theta,
        energy_trace: trace,
        starts: Vec::new(),
        start_index: 0,
        state: x,
    })
}

/// Minimizes the energy over `N′_ν`, i.e. the homogeneous quotient whose
/// infimum is `c′_ν`, starting from `init`.
pub fn minimize_quotient(p: &SystemParams, init: &StatePair, opts: &SolveOptions) -> Result<SolveReport> {
    descend(p, init, Constraint::Single, opts)
}

/// Runs the descent on `N_ν` from a single initial pair.
pub fn minimize_nehari_from(p: &SystemParams, init: &StatePair, opts: &SolveOptions) -> Result<SolveReport> {
    if p.nu() == 0.0 {
        return Err(Error::OutOfRegime("Nehari minimization needs nu != 0".into()));
    }
    descend(p, init, Constraint::Pair, opts)
}

/// Initial pairs of the multistart: the synchronized bubbles, then bubble
/// pairs at each separation.
pub fn multistart_inits(p: &SystemParams, grid: &Arc<EFGrid>, opts: &SolveOptions) -> Result<Vec<(f64, StatePair)>> {
    let mut seps = vec![0.0];
    seps.extend(opts.separations.iter().copied().filter(|&d| d > 0.0));
    seps.into_iter().map(|d| Ok((d, bubble_pair(p, grid, d)?))).collect()
}

/// Least energy over `N_ν` by multistart descent on `grid`.
pub fn minimize_nehari_on(p: &SystemParams, grid: &Arc<EFGrid>, opts: &SolveOptions) -> Result<SolveReport> {
    if p.nu() == 0.0 {
        return Err(Error::OutOfRegime("Nehari minimization needs nu != 0".into()));
    }
    opts.validate()?;
    let inits = multistart_inits(p, grid, opts)?;
    let runs: Vec<Result<SolveReport>> =
        inits.par_iter().map(|(_, init)| minimize_nehari_from(p, init, opts)).collect();

    let starts: Vec<StartRecord> = runs
        .iter()
        .zip(&inits)
        .enumerate()
        .map(|(index, (r, (d, _)))| match r {
            Ok(rep) => StartRecord {
                index,
                separation: *d,
                energy: Some(rep.energy),
                classification: Some(rep.classification),
                iterations: rep.iterations,
                error: None,
            },
            Err(e) => StartRecord {
                index,
                separation: *d,
                energy: None,
                classification: None,
                iterations: 0,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let pick = |settled_only: bool| {
        runs.iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().ok().map(|rep| (i, rep)))
            .filter(|(_, rep)| !settled_only || rep.settled())
            .min_by(|a, b| a.1.energy.total_cmp(&b.1.energy).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
    };
    let Some(best) = pick(true).or_else(|| pick(false)) else {
        return Err(Error::AllStartsFailed(starts.iter().filter_map(|s| s.error.clone()).collect()));
    };
    let mut report = runs.into_iter().nth(best).expect("index in range")?;
    report.start_index = best;
    report.starts = starts;
    Ok(report)
}

/// [`minimize_nehari_on`] with the default grid for `p`.
pub fn minimize_nehari(p: &SystemParams, opts: &SolveOptions) -> Result<SolveReport> {
    minimize_nehari_on(p, &EFGrid::for_params(p).shared(), opts)
}

/// One entry of a coupling scan.
#[derive(Debug, Clone)]
pub struct ScanEntry {
    pub nu: f64,
    pub outcome: std::result::Result<SolveReport, Error>,
}

/// Independent Nehari solves for each coupling in `nu_list` on the default
/// grid of `template`. Entries keep the order of `nu_list`.
pub fn scan(template: &SystemParams, nu_list: &[f64], opts: &SolveOptions) -> Result<Vec<ScanEntry>> {
    scan_on(template, &EFGrid::for_params(template).shared(), nu_list, opts)
}

/// [`scan`] on a given grid shared by all entries.
pub fn scan_on(template: &SystemParams, grid: &Arc<EFGrid>, nu_list: &[f64], opts: &SolveOptions) -> Result<Vec<ScanEntry>> {
    if nu_list.is_empty() {
        return Err(Error::EmptyScan);
    }
    opts.validate()?;
    Ok(nu_list
        .par_iter()
        .map(|&nu| ScanEntry {
            nu,
            outcome: template.with_nu(nu).and_then(|p| minimize_nehari_on(&p, grid, opts)),
        })
        .collect())
}
