//! Scalings onto the Nehari sets: one common multiplier for `N′_ν`
//! (`J′(tu, tv)(tu, tv) = 0`) and two independent multipliers for `N_ν`
//! (both residuals `G₁ = G₂ = 0`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{energy, EnergyBreakdown};
use crate::params::SystemParams;
use crate::profile::StatePair;

/// Relative residual a successful projection must reach.
pub const PROJECTION_TOL: f64 = 1e-10;
const NEWTON_MAX_ITERS: usize = 100;
const NEWTON_TOL: f64 = 1e-14;

/// Multipliers `(t, s)` with `(t u, s v)` on the Nehari set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NehariScaling {
    pub t: f64,
    pub s: f64,
    /// `max(|G₁|/‖tu‖², |G₂|/‖sv‖²)` at the scaled pair.
    pub residual: f64,
}

impl NehariScaling {
    pub fn apply(&self, pair: &StatePair) -> StatePair {
        pair.scaled(self.t, self.s)
    }
}

/// Integrals in the notation of the scaling equations: `A_i = ‖·‖²`,
/// `B_i = ∫(·)₊^{2*}`, `W = ∫ u₊^α v₊^β`, all including the sphere factor.
#[derive(Debug, Clone, Copy)]
struct Coefficients {
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    w: f64,
}

impl From<&EnergyBreakdown> for Coefficients {
    fn from(e: &EnergyBreakdown) -> Self {
        Coefficients {
            a1: e.norm1_sq,
            a2: e.norm2_sq,
            b1: e.omega * e.crit1,
            b2: e.omega * e.crit2,
            w: e.omega * e.coupling,
        }
    }
}

fn relative_residual(p: &SystemParams, e: &EnergyBreakdown, t: f64, s: f64) -> f64 {
    let (g1, g2) = e.scaled_residuals(p, t, s);
    (g1.abs() / (t * t * e.norm1_sq)).max(g2.abs() / (s * s * e.norm2_sq))
}

fn finish(p: &SystemParams, e: &EnergyBreakdown, t: f64, s: f64) -> Result<NehariScaling> {
    if !(t > 0.0 && s > 0.0 && t.is_finite() && s.is_finite()) {
        return Err(Error::NotProjectable(format!("non-positive multipliers t = {t}, s = {s}")));
    }
    let residual = relative_residual(p, e, t, s);
    if !(residual < PROJECTION_TOL) {
        return Err(Error::NotProjectable(format!("residual {residual:e} after scaling")));
    }
    Ok(NehariScaling { t, s, residual })
}

/// `t* = [(‖u‖² + ‖v‖²) / ∫(u₊^{2*} + 2*ν u₊^α v₊^β + v₊^{2*})]^{1/(2*−2)}`
/// and the scaled pair `(t* u, t* v)`.
pub fn project_single(p: &SystemParams, pair: &StatePair) -> Result<(f64, StatePair)> {
    if pair.is_zero() {
        return Err(Error::ZeroProfile);
    }
    let e = energy(p, pair)?;
    let t = single_multiplier(p, &e)?;
    Ok((t, pair.scaled(t, t)))
}

pub(crate) fn single_multiplier(p: &SystemParams, e: &EnergyBreakdown) -> Result<f64> {
    let c = Coefficients::from(e);
    let pc = p.critical_exponent();
    let denom = c.b1 + c.b2 + pc * p.nu() * c.w;
    if !(denom > 0.0) {
        return Err(Error::NotProjectable(format!("critical integral {denom:e} is not positive")));
    }
    Ok(((c.a1 + c.a2) / denom).powf(1.0 / (pc - 2.0)))
}

fn check_components(e: &EnergyBreakdown) -> Result<()> {
    if !(e.norm1_sq > 0.0 && e.norm2_sq > 0.0) {
        return Err(Error::ZeroProfile);
    }
    if !(e.crit1 > 0.0 && e.crit2 > 0.0) {
        return Err(Error::NotProjectable("a component has no positive part".into()));
    }
    Ok(())
}

/// Projection onto `N_ν` for `ν > 0`.
///
/// For `N = 4`, `α = β = 2` the equations are linear in `(t², s²)` and are
/// solved exactly; otherwise damped Newton on `(ln t, ln s)` with a
/// one-dimensional bisection fallback.
pub fn project_pair_pos(p: &SystemParams, pair: &StatePair) -> Result<NehariScaling> {
    if !(p.nu() > 0.0) {
        return Err(Error::OutOfRegime(format!("project_pair_pos needs nu > 0, got {}", p.nu())));
    }
    let e = energy(p, pair)?;
    project_pos_with(p, &e)
}

fn project_pos_with(p: &SystemParams, e: &EnergyBreakdown) -> Result<NehariScaling> {
    check_components(e)?;
    let c = Coefficients::from(e);
    let nu = p.nu();
    if p.dim() == 4 && p.alpha() == 2.0 && p.beta() == 2.0 {
        // [B₁ 2νW; 2νW B₂] (t², s²)ᵀ = (A₁, A₂)ᵀ
        let off = 2.0 * nu * c.w;
        let det = c.b1 * c.b2 - off * off;
        if det.abs() <= 1e-14 * c.b1 * c.b2 {
            return Err(Error::Singular(det));
        }
        let tt = (c.b2 * c.a1 - off * c.a2) / det;
        let ss = (c.b1 * c.a2 - off * c.a1) / det;
        if !(tt > 0.0 && ss > 0.0) {
            return Err(Error::NotProjectable(format!("linear solve gives t^2 = {tt:e}, s^2 = {ss:e}")));
        }
        return finish(p, e, tt.sqrt(), ss.sqrt());
    }
    if let Some((t, s)) = newton_log(p, &c) {
        if let Ok(sc) = finish(p, e, t, s) {
            return Ok(sc);
        }
    }
    let (t, s) = reduced_bisection(p, &c)?;
    finish(p, e, t, s)
}

/// Normalized residuals `1 − (…)/A_i` of the scaling equations and their
/// Jacobian in `(x, y) = (ln t, ln s)`.
fn log_system(p: &SystemParams, c: &Coefficients, x: f64, y: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let pc = p.critical_exponent();
    let (al, be, nu) = (p.alpha(), p.beta(), p.nu());
    let e1 = ((pc - 2.0) * x).exp() * c.b1 / c.a1;
    let e2 = ((pc - 2.0) * y).exp() * c.b2 / c.a2;
    let k1 = nu * al * ((al - 2.0) * x + be * y).exp() * c.w / c.a1;
    let k2 = nu * be * (al * x + (be - 2.0) * y).exp() * c.w / c.a2;
    let f = [1.0 - e1 - k1, 1.0 - e2 - k2];
    let j = [
        [-(pc - 2.0) * e1 - (al - 2.0) * k1, -be * k1],
        [-al * k2, -(pc - 2.0) * e2 - (be - 2.0) * k2],
    ];
    (f, j)
}

fn newton_log(p: &SystemParams, c: &Coefficients) -> Option<(f64, f64)> {
    let pc = p.critical_exponent();
    let norm = |f: [f64; 2]| f[0].abs().max(f[1].abs());
    let decoupled = ((c.a1 / c.b1).ln() / (pc - 2.0), (c.a2 / c.b2).ln() / (pc - 2.0));
    let (mut x, mut y) = decoupled;
    let (f_dec, _) = log_system(p, c, x, y);
    let (f_one, _) = log_system(p, c, 0.0, 0.0);
    if norm(f_one) < norm(f_dec) {
        x = 0.0;
        y = 0.0;
    }
    for _ in 0..NEWTON_MAX_ITERS {
        let (f, j) = log_system(p, c, x, y);
        let r = norm(f);
        if r < NEWTON_TOL {
            return Some((x.exp(), y.exp()));
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let dy = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        let mut lam = 1.0;
        loop {
            let (nx, ny) = (x - lam * dx, y - lam * dy);
            let (nf, _) = log_system(p, c, nx, ny);
            if norm(nf) < r {
                x = nx;
                y = ny;
                break;
            }
            lam *= 0.5;
            if lam < 1e-12 {
                // stalled; accept if already good enough
                return (r < PROJECTION_TOL * 0.1).then(|| (x.exp(), y.exp()));
            }
        }
    }
    let (f, _) = log_system(p, c, x, y);
    (norm(f) < PROJECTION_TOL * 0.1).then(|| (x.exp(), y.exp()))
}

/// Bisection of `F₂(t, g(t))` where `s = g(t)` solves the first equation.
/// Among several roots the one nearest `(1, 1)` in log scale is returned.
fn reduced_bisection(p: &SystemParams, c: &Coefficients) -> Result<(f64, f64)> {
    let pc = p.critical_exponent();
    let (al, be, nu) = (p.alpha(), p.beta(), p.nu());
    let t0 = (c.a1 / c.b1).powf(1.0 / (pc - 2.0));
    // s^β = (t² A₁ − t^{2*} B₁) / (να t^α W)
    let g = |t: f64| -> Option<f64> {
        let sb = (t * t * c.a1 - t.powf(pc) * c.b1) / (nu * al * t.powf(al) * c.w);
        (sb > 0.0 && sb.is_finite()).then(|| sb.powf(1.0 / be))
    };
    let f = |t: f64| g(t).map(|s| log_system(p, c, t.ln(), s.ln()).0[1]);
    let (lo, hi) = if nu > 0.0 { (t0 * 1e-8, t0) } else { (t0, t0 * 1e6) };
    let mesh = 2000;
    let ts: Vec<f64> = (1..mesh).map(|i| lo * (hi / lo).powf(i as f64 / mesh as f64)).collect();
    let mut best: Option<(f64, f64, f64)> = None;
    for w in ts.windows(2) {
        let (Some(fa), Some(fb)) = (f(w[0]), f(w[1])) else { continue };
        if (fa > 0.0) == (fb > 0.0) {
            continue;
        }
        let (mut a, mut b, mut fa) = (w[0], w[1], fa);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let Some(fm) = f(m) else { break };
            if (fm > 0.0) == (fa > 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        let t = 0.5 * (a + b);
        if let Some(s) = g(t) {
            let dist = t.ln().abs() + s.ln().abs();
            if best.is_none_or(|(d, _, _)| dist < d) {
                best = Some((dist, t, s));
            }
        }
    }
    best.map(|(_, t, s)| (t, s))
        .ok_or_else(|| Error::NotProjectable("no root of the reduced scaling equation".into()))
}

/// Projection onto `N_ν` for `ν < 0`: check the solvability condition, try
/// Newton from the decoupled scalings, and otherwise bracket the root of the
/// reduced equation `f(t)` on `(t₀, T]` and bisect; `s = g(t)`.
pub fn project_pair_neg(p: &SystemParams, pair: &StatePair) -> Result<NehariScaling> {
    if !(p.nu() < 0.0) {
        return Err(Error::OutOfRegime(format!("project_pair_neg needs nu < 0, got {}", p.nu())));
    }
    let e = energy(p, pair)?;
    project_neg_with(p, &e)
}

fn project_neg_with(p: &SystemParams, e: &EnergyBreakdown) -> Result<NehariScaling> {
    check_components(e)?;
    let k = Coefficients::from(e);
    let pc = p.critical_exponent();
    let (al, be) = (p.alpha(), p.beta());
    let (a1, a2, b1, b2) = (k.a1, k.a2, k.b1, k.b2);
    let c = p.nu().abs() * k.w;
    let t0 = (a1 / b1).powf(1.0 / (pc - 2.0));
    if c == 0.0 {
        return finish(p, e, t0, (a2 / b2).powf(1.0 / (pc - 2.0)));
    }
    let lhs = al * b1.ln() + be * b2.ln();
    let rhs = al * al.ln() + be * be.ln() + pc * c.ln();
    if !(lhs > rhs) {
        return Err(Error::ConditionFailed { lhs: lhs.exp(), rhs: rhs.exp() });
    }
    // weakly interacting pairs: the reduced equation cancels badly, while
    // Newton from the decoupled scalings converges in a few steps
    if let Some((t, s)) = newton_log(p, &k) {
        if let Ok(sc) = finish(p, e, t, s) {
            return Ok(sc);
        }
    }
    let x = |t: f64| (b1 - a1 * t.powf(2.0 - pc)) / (al * c);
    let f = |t: f64| {
        let xt = x(t);
        a2 * xt.powf((2.0 - be) / be) + t.powf(pc - 2.0) * (be * c - b2 * xt.powf(al / be))
    };
    let mut lo = t0 * (1.0 + 1e-9);
    while !(f(lo) > 0.0) && lo < t0 * 1.1 {
        lo = t0 + (lo - t0) * 10.0;
    }
    let mut hi = 10.0 * t0;
    while !(f(hi) < 0.0) {
        if hi >= 1e6 * t0 {
            return Err(Error::NoBracket(hi));
        }
        hi *= 10.0;
    }
    for _ in 0..300 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if f(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let t = 0.5 * (lo + hi);
    let s = t * x(t).powf(1.0 / be);
    finish(p, e, t, s)
}

/// Dispatches on the sign of `ν`; `ν = 0` gives the independent scalings.
pub fn project_pair(p: &SystemParams, pair: &StatePair) -> Result<NehariScaling> {
    let e = energy(p, pair)?;
    project_pair_with(p, &e)
}

pub(crate) fn project_pair_with(p: &SystemParams, e: &EnergyBreakdown) -> Result<NehariScaling> {
    if p.nu() > 0.0 {
        project_pos_with(p, e)
    } else if p.nu() < 0.0 {
        project_neg_with(p, e)
    } else {
        check_components(e)?;
        let k = Coefficients::from(e);
        let pc = p.critical_exponent();
        finish(p, e, (k.a1 / k.b1).powf(1.0 / (pc - 2.0)), (k.a2 / k.b2).powf(1.0 / (pc - 2.0)))
    }
}
