//! The discrete energy `J_ν` in Emden–Fowler coordinates, its exact
//! gradient, the Nehari residuals and the Sobolev quotient.
//!
//! With `u(r) = r^{−(N−2)/2} w(ln r)` the quadratic form becomes
//! `‖u‖²_λ = ω ∫ (w′² + μ² w²) ds`, `μ² = Λ_N − λ`, and every critical
//! integral `∫ |u|^a |v|^b dx` with `a + b = 2*` becomes `ω ∫ |w₁|^a |w₂|^b ds`.
//!
//! Discretization: the first and last samples are Dirichlet zeros, integrals
//! use the uniform weight `h` on interior points, and `∫ w′²` is the
//! quadratic form of the fourth-order five-point Laplacian. The gradient
//! returned by [`gradient`] is the exact gradient of this discrete energy
//! with respect to the `h`-weighted inner product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::sphere_area;
use crate::params::{critical_exponent, decay_rate, SystemParams};
use crate::profile::{Profile, StatePair};

#[inline]
fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// `(L w)_j` for the five-point fourth-order `−d²/ds²` with zero ghosts and
/// Dirichlet ends. Endpoint entries of `out` are set to zero.
pub fn apply_kinetic(values: &[f64], h: f64, out: &mut [f64]) {
    let n = values.len();
    let at = |k: isize| -> f64 {
        if k <= 0 || k >= n as isize - 1 {
            0.0
        } else {
            values[k as usize]
        }
    };
    let c = 1.0 / (12.0 * h * h);
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for j in 1..n - 1 {
        let k = j as isize;
        out[j] = c
            * (at(k - 2) - 16.0 * at(k - 1) + 30.0 * values[j] - 16.0 * at(k + 1) + at(k + 2));
    }
}

/// Discrete `∫ w′² ds`.
pub fn kinetic_integral(values: &[f64], h: f64) -> f64 {
    let mut lw = vec![0.0; values.len()];
    apply_kinetic(values, h, &mut lw);
    h * values.iter().zip(&lw).map(|(a, b)| a * b).sum::<f64>()
}

/// Uniform-weight quadrature over interior points.
fn interior_sum(n: usize, h: f64, f: impl Fn(usize) -> f64) -> f64 {
    h * (1..n - 1).map(f).sum::<f64>()
}

/// `ω ∫ (w′² + μ² w²) ds`, i.e. `‖u‖²_λ`.
pub fn hardy_norm_sq(dim: usize, lambda: f64, w: &Profile) -> f64 {
    let h = w.grid().spacing();
    let v = w.values();
    let mu2 = decay_rate(dim, lambda).powi(2);
    let mass = interior_sum(v.len(), h, |j| v[j] * v[j]);
    sphere_area(dim) * (kinetic_integral(v, h) + mu2 * mass)
}

/// Energy components of a pair.
///
/// `norm*_sq` carry the sphere factor `ω`; `crit*` and `coupling` are the
/// bare line integrals, so that
/// `total = ½(norm1_sq + norm2_sq) − ω(crit1 + crit2)/2* − ν ω coupling`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub norm1_sq: f64,
    pub norm2_sq: f64,
    pub crit1: f64,
    pub crit2: f64,
    pub coupling: f64,
    pub total: f64,
    pub omega: f64,
}

impl EnergyBreakdown {
    fn assemble(p: &SystemParams, norm1_sq: f64, norm2_sq: f64, crit1: f64, crit2: f64, coupling: f64) -> Self {
        let omega = sphere_area(p.dim());
        let pc = p.critical_exponent();
        let total = 0.5 * (norm1_sq + norm2_sq) - omega * (crit1 + crit2) / pc - p.nu() * omega * coupling;
        EnergyBreakdown { norm1_sq, norm2_sq, crit1, crit2, coupling, total, omega }
    }

    /// `J̄_ν(t u, s v)` from the homogeneity of each term (`t, s ≥ 0`).
    pub fn scaled_total(&self, p: &SystemParams, t: f64, s: f64) -> f64 {
        let pc = p.critical_exponent();
        0.5 * (t * t * self.norm1_sq + s * s * self.norm2_sq)
            - self.omega * (t.powf(pc) * self.crit1 + s.powf(pc) * self.crit2) / pc
            - p.nu() * self.omega * t.powf(p.alpha()) * s.powf(p.beta()) * self.coupling
    }

    /// Nehari residuals `(G₁, G₂)` of `(t u, s v)`.
    pub fn scaled_residuals(&self, p: &SystemParams, t: f64, s: f64) -> (f64, f64) {
        let pc = p.critical_exponent();
        let c = p.nu() * self.omega * t.powf(p.alpha()) * s.powf(p.beta()) * self.coupling;
        (
            t * t * self.norm1_sq - self.omega * t.powf(pc) * self.crit1 - p.alpha() * c,
            s * s * self.norm2_sq - self.omega * s.powf(pc) * self.crit2 - p.beta() * c,
        )
    }

    pub fn residuals(&self, p: &SystemParams) -> (f64, f64) {
        self.scaled_residuals(p, 1.0, 1.0)
    }
}

/// `x ↦ x^e` for `x ≥ 0`, avoiding `powf` for integer and half-integer `e`.
#[derive(Clone, Copy)]
enum Power {
    Int(i32),
    Half(i32),
    Real(f64),
}

impl Power {
    fn new(e: f64) -> Self {
        let twice = (2.0 * e).round();
        if (2.0 * e - twice).abs() > 1e-12 || twice.abs() > 64.0 {
            Power::Real(e)
        } else if twice as i32 % 2 == 0 {
            Power::Int(twice as i32 / 2)
        } else {
            Power::Half((twice as i32 - 1) / 2)
        }
    }

    #[inline]
    fn of(self, x: f64) -> f64 {
        match self {
            Power::Int(k) => x.powi(k),
            Power::Half(k) => x.powi(k) * x.sqrt(),
            Power::Real(e) => x.powf(e),
        }
    }
}

/// Evaluates `J̄_ν` and its components (positive parts in the nonlinear terms).
pub fn energy(p: &SystemParams, pair: &StatePair) -> Result<EnergyBreakdown> {
    if !pair.w1.same_grid(&pair.w2) {
        return Err(Error::GridMismatch);
    }
    let n = pair.grid().len();
    let h = pair.grid().spacing();
    let omega = sphere_area(p.dim());
    let a = pair.w1.values();
    let b = pair.w2.values();
    let pc = p.critical_exponent();
    let (al, be) = (p.alpha(), p.beta());
    let (mu1, mu2) = (p.mu1().powi(2), p.mu2().powi(2));

    let mass1 = interior_sum(n, h, |j| a[j] * a[j]);
    let mass2 = interior_sum(n, h, |j| b[j] * b[j]);
    let norm1_sq = omega * (kinetic_integral(a, h) + mu1 * mass1);
    let norm2_sq = omega * (kinetic_integral(b, h) + mu2 * mass2);
    let (pw_c, pw_a, pw_b) = (Power::new(pc), Power::new(al), Power::new(be));
    let crit1 = interior_sum(n, h, |j| pw_c.of(pos(a[j])));
    let crit2 = interior_sum(n, h, |j| pw_c.of(pos(b[j])));
    let coupling = interior_sum(n, h, |j| pw_a.of(pos(a[j])) * pw_b.of(pos(b[j])));
    Ok(EnergyBreakdown::assemble(p, norm1_sq, norm2_sq, crit1, crit2, coupling))
}

/// `L²(ds)`-gradient of the discrete `J̄_ν`: for every direction `d`,
/// `h Σ_j (g₁ d₁ + g₂ d₂)_j` is the exact directional derivative.
/// Endpoint entries are zero.
pub fn gradient(p: &SystemParams, pair: &StatePair) -> Result<StatePair> {
    if !pair.w1.same_grid(&pair.w2) {
        return Err(Error::GridMismatch);
    }
    let grid = pair.grid().clone();
    let n = grid.len();
    let h = grid.spacing();
    let omega = sphere_area(p.dim());
    let a = pair.w1.values();
    let b = pair.w2.values();
    let pc = p.critical_exponent();
    let (al, be, nu) = (p.alpha(), p.beta(), p.nu());
    let (mu1, mu2) = (p.mu1().powi(2), p.mu2().powi(2));

    let mut g1 = vec![0.0; n];
    let mut g2 = vec![0.0; n];
    apply_kinetic(a, h, &mut g1);
    apply_kinetic(b, h, &mut g2);
    let (pw_c, pw_a, pw_b) = (Power::new(pc - 1.0), Power::new(al), Power::new(be));
    let (pw_a1, pw_b1) = (Power::new(al - 1.0), Power::new(be - 1.0));
    for j in 1..n - 1 {
        let (u, v) = (pos(a[j]), pos(b[j]));
        let (ua, vb) = (pw_a.of(u), pw_b.of(v));
        let du = if u > 0.0 { pw_c.of(u) + nu * al * pw_a1.of(u) * vb } else { 0.0 };
        let dv = if v > 0.0 { pw_c.of(v) + nu * be * ua * pw_b1.of(v) } else { 0.0 };
        g1[j] = omega * (g1[j] + mu1 * a[j] - du);
        g2[j] = omega * (g2[j] + mu2 * b[j] - dv);
    }
    StatePair::new(Profile::new(grid.clone(), g1)?, Profile::new(grid, g2)?)
}

/// `h`-weighted inner product of two pairs.
pub fn inner(x: &StatePair, y: &StatePair) -> f64 {
    let h = x.grid().spacing();
    let dot = |a: &Profile, b: &Profile| a.values().iter().zip(b.values()).map(|(p, q)| p * q).sum::<f64>();
    h * (dot(&x.w1, &y.w1) + dot(&x.w2, &y.w2))
}

/// `G₁ = ‖u‖²_{λ₁} − ∫(u₊^{2*} + να u₊^α v₊^β)`, `G₂` likewise with `β`.
pub fn nehari_residuals(p: &SystemParams, pair: &StatePair) -> Result<(f64, f64)> {
    Ok(energy(p, pair)?.residuals(p))
}

/// Single-equation energy `I_λ(u) = ½‖u‖²_λ − (1/2*)∫ u₊^{2*}`.
pub fn single_energy(dim: usize, lambda: f64, w: &Profile) -> f64 {
    let pc = critical_exponent(dim);
    let v = w.values();
    let crit = interior_sum(v.len(), w.grid().spacing(), |j| pos(v[j]).powf(pc));
    0.5 * hardy_norm_sq(dim, lambda, w) - sphere_area(dim) * crit / pc
}

/// `‖u‖²_λ / |u|²_{2*}` of the radial function represented by `w`.
pub fn sobolev_quotient(dim: usize, lambda: f64, w: &Profile) -> Result<f64> {
    if w.is_zero() {
        return Err(Error::ZeroProfile);
    }
    let pc = critical_exponent(dim);
    let v = w.values();
    let crit = sphere_area(dim) * interior_sum(v.len(), w.grid().spacing(), |j| v[j].abs().powf(pc));
    if crit == 0.0 {
        return Err(Error::ZeroProfile);
    }
    Ok(hardy_norm_sq(dim, lambda, w) / crit.powf(2.0 / pc))
}
