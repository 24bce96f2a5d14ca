//! Uniform symmetric grids in the Emden–Fowler variable `s = ln r`,
//! composite Simpson quadrature, and the sphere-area factor.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Default half-width of the grid.
pub const DEFAULT_HALF_WIDTH: f64 = 18.0;
/// Default point count on the default half-width.
pub const DEFAULT_POINTS: usize = 4001;
/// Decay exponent `μ·L` a profile must reach at the grid edge before the
/// default grid stops widening (`e^{−20} ≈ 2e−9`).
pub const EDGE_DECAY: f64 = 20.0;

/// Uniform grid on `[−L, L]` with an odd number of points and Simpson weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EFGrid {
    half_width: f64,
    n: usize,
    h: f64,
    weights: Vec<f64>,
}

/// Builds the grid on `[−half_width, half_width]` with `n` points.
pub fn make_grid(half_width: f64, n: usize) -> Result<EFGrid> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::BadGrid(format!("half width must be positive, got {half_width}")));
    }
    if n < 3 || n % 2 == 0 {
        return Err(Error::BadGrid(format!("point count must be odd and at least 3, got {n}")));
    }
    let h = 2.0 * half_width / (n - 1) as f64;
    let weights = (0..n)
        .map(|j| {
            let c = if j == 0 || j == n - 1 {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect();
    Ok(EFGrid { half_width, n, h, weights })
}

impl EFGrid {
    /// `L = 18`, `n = 4001` (`h = 0.009`).
    pub fn default_grid() -> EFGrid {
        make_grid(DEFAULT_HALF_WIDTH, DEFAULT_POINTS).expect("default grid is valid")
    }

    /// Default spacing, with the half-width widened until the slower of the
    /// two profiles has decayed by `e^{−EDGE_DECAY}` at the edge.
    pub fn for_params(params: &SystemParams) -> EFGrid {
        Self::for_decay(params.mu1().min(params.mu2()))
    }

    /// Same policy as [`EFGrid::for_params`] for a single decay rate `μ`.
    pub fn for_decay(mu: f64) -> EFGrid {
        let h = 2.0 * DEFAULT_HALF_WIDTH / (DEFAULT_POINTS - 1) as f64;
        Self::for_decay_with_spacing(mu, h).expect("positive spacing")
    }

    /// [`EFGrid::for_decay`] with spacing `h` instead of the default.
    pub fn for_decay_with_spacing(mu: f64, h: f64) -> Result<EFGrid> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::BadGrid(format!("spacing must be positive, got {h}")));
        }
        let wanted = DEFAULT_HALF_WIDTH.max(EDGE_DECAY / mu);
        let half_cells = (wanted / h - 1e-9).ceil() as usize;
        make_grid(half_cells as f64 * h, 2 * half_cells + 1)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    pub fn s_min(&self) -> f64 {
        -self.half_width
    }
    pub fn s_max(&self) -> f64 {
        self.half_width
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
    pub fn spacing(&self) -> f64 {
        self.h
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    /// Index of `s = 0`.
    pub fn mid(&self) -> usize {
        self.n / 2
    }

    /// Grid point `s_j`.
    pub fn point(&self, j: usize) -> f64 {
        // Measured from the middle so the grid is exactly symmetric.
        (j as f64 - self.mid() as f64) * self.h
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.point(j))
    }

    /// Simpson quadrature of `samples`.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: samples.len() });
        }
        Ok(self.weights.iter().zip(samples).map(|(w, f)| w * f).sum())
    }

    /// Simpson quadrature of `f` sampled at the grid points.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points().zip(&self.weights).map(|(s, w)| w * f(s)).sum()
    }

    pub fn shared(self) -> Arc<EFGrid> {
        Arc::new(self)
    }
}

/// Serializable `(L, n)` pair describing a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<EFGrid> {
        make_grid(self.half_width, self.n)
    }
}

impl From<&EFGrid> for GridSpec {
    fn from(g: &EFGrid) -> Self {
        GridSpec { half_width: g.half_width, n: g.n }
    }
}

/// `Γ(k/2)` for a positive integer `k`, from the integer and half-integer
/// closed forms.
pub fn gamma_half(k: usize) -> f64 {
    assert!(k > 0, "gamma_half needs a positive argument");
    if k % 2 == 0 {
        (1..k / 2).map(|i| i as f64).product()
    } else {
        // Γ(1/2) = √π, Γ(x + 1) = x Γ(x)
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < k as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Surface area `ω_{N−1} = 2π^{N/2}/Γ(N/2)` of the unit sphere in `ℝ^N`.
pub fn sphere_area(dim: usize) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half(dim)
}
