//! Positive roots of the amplitude system of synchronized states,
//!
//! ```text
//! k^{p−1} + pν k^{p/2−1} l^{p/2} = 1,
//! pν k^{p/2} l^{p/2−1} + l^{p−1} = 1,      p = 2*/2,
//! ```
//!
//! for `N ≥ 5` (so `1 < p < 2`). For fixed `k` the second equation is convex
//! in `l` with a single interior minimum, so it has either no root or one
//! root on each side of the minimum; both branches are followed while `k`
//! is swept over a log-uniform mesh and sign changes of the first equation
//! are refined by bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::critical_exponent;

/// Mesh points of the `k` sweep.
pub const K_MESH: usize = 2000;
/// Lower end of the `k` sweep.
pub const K_MIN: f64 = 1e-6;
/// `|det J|` below which a root is reported as degenerate.
pub const DEGENERATE_DET: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KLSolution {
    pub k: f64,
    pub l: f64,
    /// `max(|eq₁|, |eq₂|)` at the root.
    pub residual: f64,
    /// Jacobian determinant of the system at the root.
    pub jacobian_det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlRoots {
    pub p: f64,
    pub nu: f64,
    /// Sorted by increasing `k`.
    pub roots: Vec<KLSolution>,
    /// Some root has a (near) singular Jacobian.
    pub degenerate: bool,
}

impl KlRoots {
    /// The root of smallest `k`.
    pub fn k0(&self) -> &KLSolution {
        &self.roots[0]
    }

    /// `k = l = (1 + pν)^{−1/(p−1)}`.
    pub fn symmetric(&self) -> f64 {
        symmetric_root(self.p, self.nu)
    }
}

pub fn symmetric_root(p: f64, nu: f64) -> f64 {
    (1.0 + p * nu).powf(-1.0 / (p - 1.0))
}

#[derive(Clone, Copy)]
struct System {
    p: f64,
    nu: f64,
}

impl System {
    fn eq1(&self, k: f64, l: f64) -> f64 {
        let p = self.p;
        k.powf(p - 1.0) + p * self.nu * k.powf(p / 2.0 - 1.0) * l.powf(p / 2.0) - 1.0
    }

    fn eq2(&self, k: f64, l: f64) -> f64 {
        self.eq1(l, k)
    }

    fn jacobian_det(&self, k: f64, l: f64) -> f64 {
        let p = self.p;
        let c = p * self.nu;
        let d1k = (p - 1.0) * k.powf(p - 2.0) + c * (p / 2.0 - 1.0) * k.powf(p / 2.0 - 2.0) * l.powf(p / 2.0);
        let d1l = c * (p / 2.0) * k.powf(p / 2.0 - 1.0) * l.powf(p / 2.0 - 1.0);
        let d2l = (p - 1.0) * l.powf(p - 2.0) + c * (p / 2.0 - 1.0) * l.powf(p / 2.0 - 2.0) * k.powf(p / 2.0);
        let d2k = c * (p / 2.0) * l.powf(p / 2.0 - 1.0) * k.powf(p / 2.0 - 1.0);
        d1k * d2l - d1l * d2k
    }

    /// Roots in `l` of the second equation at fixed `k`: `[lower, upper]`.
    fn l_branches(&self, k: f64) -> [Option<f64>; 2] {
        let p = self.p;
        let c = p * self.nu * k.powf(p / 2.0);
        let h = |l: f64| self.eq2(k, l);
        let l_star = (c * (1.0 - p / 2.0) / (p - 1.0)).powf(2.0 / p);
        if !(h(l_star) < 0.0) {
            return [None, None];
        }
        // h(l) > c l^{p/2−1} − 1 > 0 below this point
        let mut l_lo = 0.5 * l_star.min(c.powf(2.0 / (2.0 - p)));
        while h(l_lo) <= 0.0 {
            l_lo *= 0.5;
        }
        let lower = bisect(|x| h(x.exp()), l_lo.ln(), l_star.ln()).exp();
        // h(1) = c ≥ 0
        let upper = bisect(h, l_star, 1.0);
        [Some(lower), Some(upper)]
    }

    fn root(&self, k: f64, l: f64) -> KLSolution {
        KLSolution {
            k,
            l,
            residual: self.eq1(k, l).abs().max(self.eq2(k, l).abs()),
            jacobian_det: self.jacobian_det(k, l),
        }
    }
}

/// Bisection to machine resolution on a sign-changing bracket.
fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// All positive roots of the amplitude system, sorted by `k`.
pub fn solve_kl(dim: usize, nu: f64) -> Result<KlRoots> {
    if dim < 5 {
        return Err(Error::OutOfRegime(format!("the k-l system needs N >= 5, got {dim}")));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::OutOfRegime(format!("the k-l system needs nu > 0, got {nu}")));
    }
    let p = critical_exponent(dim) / 2.0;
    let sys = System { p, nu };
    let ks: Vec<f64> = (0..K_MESH)
        .map(|i| (K_MIN.ln() * (1.0 - i as f64 / (K_MESH - 1) as f64)).exp())
        .collect();

    let mut found: Vec<KLSolution> = Vec::new();
    for branch in 0..2 {
        let r = |k: f64| sys.l_branches(k)[branch].map(|l| sys.eq1(k, l));
        let mut prev: Option<(f64, f64)> = None;
        for &k in &ks {
            let cur = r(k).map(|v| (k, v));
            if let (Some((k0, v0)), Some((k1, v1))) = (prev, cur) {
                if v0 == 0.0 || (v0 > 0.0) != (v1 > 0.0) {
                    let kr = bisect(|k| r(k).unwrap_or(f64::NAN), k0, k1);
                    if let Some(l) = sys.l_branches(kr)[branch] {
                        found.push(sys.root(kr, l));
                    }
                }
            }
            prev = cur;
        }
    }
    let ks_sym = symmetric_root(p, nu);
    found.push(sys.root(ks_sym, ks_sym));
    // the system is symmetric under (k, l) ↔ (l, k); mirrors of roots near
    // the ends of the k-mesh are otherwise easy to miss
    let mirrors: Vec<KLSolution> = found.iter().map(|r| sys.root(r.l, r.k)).collect();
    found.extend(mirrors);

    found.sort_by(|a, b| a.k.total_cmp(&b.k));
    let mut roots: Vec<KLSolution> = Vec::new();
    for r in found {
        match roots.iter_mut().find(|o| (o.k - r.k).abs() < 1e-9 && (o.l - r.l).abs() < 1e-9) {
            Some(o) => {
                if r.residual < o.residual {
                    *o = r;
                }
            }
            None => roots.push(r),
        }
    }
    if roots.is_empty() {
        return Err(Error::NoRoot);
    }
    let degenerate = roots.iter().any(|r| r.jacobian_det.abs() < DEGENERATE_DET);
    Ok(KlRoots { p, nu, roots, degenerate })
}
