//! Two-bubble mountain-pass level: the maximum of the truncated energy over
//! the rectangle `Q = [0, t₁]²` of scalings `(t z¹, s z²)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{bubble_ef_profile, BubbleSpec};
use crate::error::{Error, Result};
use crate::functional::{energy, EnergyBreakdown};
use crate::grid::EFGrid;
use crate::params::{Component, SystemParams};
use crate::profile::StatePair;

pub const DEFAULT_MP_RESOLUTION: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MountainPass {
    /// `d_ν`.
    pub level: f64,
    /// Maximizer `(t, s)` in `Q`.
    pub t: f64,
    pub s: f64,
    /// Side of the rectangle.
    pub t1: f64,
    /// Discrete single-bubble maxima `max_t I_{λ_i}(t z^i)`.
    pub m1: f64,
    pub m2: f64,
}

struct Surface<'a> {
    p: &'a SystemParams,
    e: EnergyBreakdown,
}

impl Surface<'_> {
    fn value(&self, t: f64, s: f64) -> f64 {
        self.e.scaled_total(self.p, t, s)
    }

    fn single(&self, c: Component, t: f64) -> f64 {
        let pc = self.p.critical_exponent();
        let (k, b) = match c {
            Component::First => (self.e.norm1_sq, self.e.omega * self.e.crit1),
            Component::Second => (self.e.norm2_sq, self.e.omega * self.e.crit2),
        };
        0.5 * t * t * k - t.powf(pc) * b / pc
    }

    /// Maximizer and maximum of `t ↦ I(t z)`.
    fn single_max(&self, c: Component) -> (f64, f64) {
        let pc = self.p.critical_exponent();
        let (k, b) = match c {
            Component::First => (self.e.norm1_sq, self.e.omega * self.e.crit1),
            Component::Second => (self.e.norm2_sq, self.e.omega * self.e.crit2),
        };
        let t = (k / b).powf(1.0 / (pc - 2.0));
        (t, self.single(c, t))
    }

    fn grad_hess(&self, t: f64, s: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let p = self.p;
        let pc = p.critical_exponent();
        let (al, be) = (p.alpha(), p.beta());
        let w = p.nu() * self.e.omega * self.e.coupling;
        let (k1, k2) = (self.e.norm1_sq, self.e.norm2_sq);
        let (b1, b2) = (self.e.omega * self.e.crit1, self.e.omega * self.e.crit2);
        let gt = t * k1 - t.powf(pc - 1.0) * b1 - al * w * t.powf(al - 1.0) * s.powf(be);
        let gs = s * k2 - s.powf(pc - 1.0) * b2 - be * w * t.powf(al) * s.powf(be - 1.0);
        let htt = k1 - (pc - 1.0) * t.powf(pc - 2.0) * b1 - al * (al - 1.0) * w * t.powf(al - 2.0) * s.powf(be);
        let hss = k2 - (pc - 1.0) * s.powf(pc - 2.0) * b2 - be * (be - 1.0) * w * t.powf(al) * s.powf(be - 2.0);
        let hts = -al * be * w * t.powf(al - 1.0) * s.powf(be - 1.0);
        ([gt, gs], [[htt, hts], [hts, hss]])
    }
}

/// Smallest `t > t_max` with `I(t z) ≤ level`.
fn descend_to(surface: &Surface, c: Component, level: f64) -> f64 {
    let (mut lo, _) = surface.single_max(c);
    let mut hi = 2.0 * lo;
    while surface.single(c, hi) > level {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if surface.single(c, mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `d_ν` for `ν ≥ 0` with unit bubbles `z_1^i` centered at `s = 0`.
///
/// `t₁` is the smallest `t > 1` at which both single energies have fallen to
/// a quarter of the smaller single ground energy; `Q` is scanned at
/// `resolution × resolution` points and the best point is polished by Newton
/// steps on the gradient of the two-variable energy.
pub fn mountain_pass_level(p: &SystemParams, grid: &Arc<EFGrid>, resolution: usize) -> Result<MountainPass> {
    if !(p.nu() >= 0.0) {
        return Err(Error::OutOfRegime(format!("mountain-pass level needs nu >= 0, got {}", p.nu())));
    }
    if resolution < 2 {
        return Err(Error::InvalidOptions("resolution must be at least 2".into()));
    }
    let z1 = bubble_ef_profile(p.dim(), p.lambda1(), &BubbleSpec::centered_at(Component::First, 0.0), grid)?;
    let z2 = bubble_ef_profile(p.dim(), p.lambda2(), &BubbleSpec::centered_at(Component::Second, 0.0), grid)?;
    let e = energy(p, &StatePair::new(z1, z2)?)?;
    let surface = Surface { p, e };

    let (_, m1) = surface.single_max(Component::First);
    let (_, m2) = surface.single_max(Component::Second);
    let quarter = 0.25 * m1.min(m2);
    let t1 = descend_to(&surface, Component::First, quarter).max(descend_to(&surface, Component::Second, quarter));

    let step = t1 / (resolution - 1) as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..resolution {
        let t = i as f64 * step;
        for j in 0..resolution {
            let s = j as f64 * step;
            let v = surface.value(t, s);
            if v > best.0 {
                best = (v, t, s);
            }
        }
    }

    let (mut level, mut t, mut s) = best;
    if t > 0.0 && s > 0.0 {
        for _ in 0..50 {
            let (g, h) = surface.grad_hess(t, s);
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let dt = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
            let ds = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
            let (nt, ns) = (t - dt, s - ds);
            if !(nt > 0.0 && ns > 0.0 && nt <= t1 && ns <= t1) {
                break;
            }
            let v = surface.value(nt, ns);
            if v < level - 1e-15 * level.abs() {
                break;
            }
            let done = dt.abs() < 1e-15 * t && ds.abs() < 1e-15 * s;
            level = level.max(v);
            t = nt;
            s = ns;
            if done {
                break;
            }
        }
    }
    Ok(MountainPass { level, t, s, t1, m1, m2 })
}
