//! Exact solutions and constants: the bubble family, the Sobolev constant
//! and its Hardy-weighted version, coupling thresholds, the synchronized
//! solutions and the two-bubble mountain-pass level.

mod kl;
mod mountain_pass;

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

pub use kl::{solve_kl, symmetric_root, KLSolution, KlRoots};
pub use mountain_pass::{mountain_pass_level, MountainPass, DEFAULT_MP_RESOLUTION};

use crate::error::{Error, Result};
use crate::grid::{make_grid, sphere_area, EFGrid};
use crate::params::{check_dim, check_hardy, critical_exponent, hardy_limit, Component, SystemParams};
use crate::profile::{Profile, StatePair};

/// `a_λ = (N−2)/2 − sqrt(Λ_N − λ)`, the singular exponent of the bubble at
/// the origin.
pub fn a_lambda(dim: usize, lambda: f64) -> Result<f64> {
    check_hardy(dim, lambda, true)?;
    Ok((dim as f64 - 2.0) / 2.0 - (hardy_limit(dim) - lambda).sqrt())
}

/// Bubble amplitude `[N (N−2−2a_λ)² / (N−2)]^{(N−2)/4}`.
///
/// The printed constant `N(N−2−2a_λ)²/(N−2)` lacks the outer power; with it
/// the `N = 4`, `λ = 0` bubble reduces to the instanton `2√2 ε/(ε² + |x|²)`.
pub fn bubble_amplitude(dim: usize, lambda: f64) -> Result<f64> {
    let a = a_lambda(dim, lambda)?;
    let m = dim as f64 - 2.0;
    Ok((dim as f64 * (m - 2.0 * a).powi(2) / m).powf(m / 4.0))
}

/// One member `z_μ^i` of the bubble family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleSpec {
    pub component: Component,
    /// Dilation parameter `μ > 0`.
    pub mu_scale: f64,
    /// `ln μ`, the bubble center in `s`.
    pub center_s: f64,
}

impl BubbleSpec {
    pub fn new(component: Component, mu_scale: f64) -> Result<Self> {
        if !(mu_scale.is_finite() && mu_scale > 0.0) {
            return Err(Error::OutOfRegime(format!("bubble scale must be positive, got {mu_scale}")));
        }
        Ok(BubbleSpec { component, mu_scale, center_s: mu_scale.ln() })
    }

    pub fn centered_at(component: Component, center_s: f64) -> Self {
        BubbleSpec { component, mu_scale: center_s.exp(), center_s }
    }
}

/// Closed-form Emden–Fowler bubble `w(s) = A (2 cosh(κ(s − c)))^{−(N−2)/2}`
/// with `κ = 2μ/(N−2)`, `μ = sqrt(Λ_N − λ)`. Returns `(w, w′)`.
#[derive(Debug, Clone, Copy)]
pub struct BubbleShape {
    amp: f64,
    kappa: f64,
    m: f64,
    center: f64,
}

impl BubbleShape {
    pub fn new(dim: usize, lambda: f64, center: f64) -> Result<Self> {
        let amp = bubble_amplitude(dim, lambda)?;
        let m = (dim as f64 - 2.0) / 2.0;
        let mu = (hardy_limit(dim) - lambda).sqrt();
        Ok(BubbleShape { amp, kappa: mu / m, m, center })
    }

    pub fn value(&self, s: f64) -> f64 {
        // (2 cosh x)^{−m} = e^{−m|x|} (1 + e^{−2|x|})^{−m}, overflow-free
        let x = (self.kappa * (s - self.center)).abs();
        self.amp * (-self.m * x).exp() * (1.0 + (-2.0 * x).exp()).powf(-self.m)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let x = self.kappa * (s - self.center);
        -self.m * self.kappa * self.value(s) * x.tanh()
    }
}

/// Samples the bubble `z_μ^i` on `grid`.
pub fn bubble_ef_profile(dim: usize, lambda: f64, spec: &BubbleSpec, grid: &Arc<EFGrid>) -> Result<Profile> {
    let shape = BubbleShape::new(dim, lambda, spec.center_s)?;
    Profile::from_fn(grid.clone(), |s| shape.value(s))
}

/// Sobolev quotient of the exact bubble from its analytic derivative and
/// Simpson quadrature on a window where the profile has decayed below
/// double precision.
fn bubble_quotient_analytic(dim: usize, lambda: f64, spacing: f64) -> Result<f64> {
    let shape = BubbleShape::new(dim, lambda, 0.0)?;
    let mu = (hardy_limit(dim) - lambda).sqrt();
    let half_cells = (20.0 / mu / spacing).ceil() as usize;
    let grid = make_grid(half_cells as f64 * spacing, 2 * half_cells + 1)?;
    let pc = critical_exponent(dim);
    let omega = sphere_area(dim);
    let norm = omega * grid.integrate_fn(|s| shape.derivative(s).powi(2) + mu * mu * shape.value(s).powi(2));
    let crit = omega * grid.integrate_fn(|s| shape.value(s).powf(pc));
    Ok(norm / crit.powf(2.0 / pc))
}

/// Spacing used for the cached Sobolev constant.
pub const SOBOLEV_SPACING: f64 = 0.0025;

/// Sharp Sobolev constant `S` of `D^{1,2}(ℝ^N) ↪ L^{2*}`, evaluated as the
/// quotient of the `λ = 0` bubble. Cached per dimension.
pub fn sobolev_constant(dim: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    assert!(dim >= 3, "sobolev_constant needs N >= 3");
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&s) = cache.lock().unwrap().get(&dim) {
        return s;
    }
    let s = sobolev_constant_at(dim, SOBOLEV_SPACING).expect("λ = 0 is admissible");
    cache.lock().unwrap().insert(dim, s);
    s
}

/// Uncached evaluation of [`sobolev_constant`] at a chosen spacing.
pub fn sobolev_constant_at(dim: usize, spacing: f64) -> Result<f64> {
    check_dim(dim)?;
    bubble_quotient_analytic(dim, 0.0, spacing)
}

/// `S(λ) = (1 − λ/Λ_N)^{(N−1)/N} S`.
pub fn s_lambda(dim: usize, lambda: f64) -> Result<f64> {
    check_hardy(dim, lambda, true)?;
    let n = dim as f64;
    Ok((1.0 - lambda / hardy_limit(dim)).powf((n - 1.0) / n) * sobolev_constant(dim))
}

/// Ground energy of the single equation, `M = S(λ)^{N/2}/N`.
pub fn single_ground_energy(dim: usize, lambda: f64) -> Result<f64> {
    Ok(s_lambda(dim, lambda)?.powf(dim as f64 / 2.0) / dim as f64)
}

/// `(M₁, M₂)` for the two components.
pub fn ground_levels(p: &SystemParams) -> (f64, f64) {
    (
        single_ground_energy(p.dim(), p.lambda1()).expect("validated"),
        single_ground_energy(p.dim(), p.lambda2()).expect("validated"),
    )
}

/// Coupling threshold above which a ground state below `min(M₁, M₂)` exists:
/// `ν₀ = [(1 + max{ρ, 1/ρ})^{2*/2} − 2]/2*`, `ρ = (Λ_N − λ₁)/(Λ_N − λ₂)`.
pub fn nu0(dim: usize, lambda1: f64, lambda2: f64) -> Result<f64> {
    check_hardy(dim, lambda1, false)?;
    check_hardy(dim, lambda2, false)?;
    let lim = hardy_limit(dim);
    let rho = (lim - lambda1) / (lim - lambda2);
    let pc = critical_exponent(dim);
    Ok(((1.0 + rho.max(1.0 / rho)).powf(pc / 2.0) - 2.0) / pc)
}

/// Small-coupling threshold for `N = 4`, `α = β = 2`.
pub fn nu1(lambda1: f64, lambda2: f64) -> Result<f64> {
    check_hardy(4, lambda1, false)?;
    check_hardy(4, lambda2, false)?;
    let (a, b) = (1.0 - lambda1, 1.0 - lambda2);
    let third = (a * b).powf(0.75) / (a.powf(1.5) + b.powf(1.5));
    Ok(0.5 * (a / b).min(b / a).min(third))
}

/// Synchronized ground state centered at `s = 0`; see
/// [`synchronized_pair_at`].
pub fn synchronized_pair(p: &SystemParams, grid: &Arc<EFGrid>, theta: Option<f64>) -> Result<StatePair> {
    synchronized_pair_at(p, grid, theta, 0.0)
}

/// Amplitudes `(c₁, c₂)` of the synchronized ground state `(c₁ z, c₂ z)`.
///
/// * `N = 4`, `α = β = 2`, `ν ≠ 1/2`: `c₁ = c₂ = (1 + 2ν)^{−1/2}`.
/// * `N = 4`, `ν = 1/2`: `(sin θ, cos θ)` for the caller's `θ ∈ (0, π/2)`.
/// * `N ≥ 5`, `α = β = 2*/2`, `ν ≥ 2/N`: `(√k₀, √l₀)` from [`solve_kl`].
pub fn synchronized_amplitudes(p: &SystemParams, theta: Option<f64>) -> Result<(f64, f64)> {
    if p.lambda1() != p.lambda2() {
        return Err(Error::OutOfRegime("synchronized states need lambda1 = lambda2".into()));
    }
    let half = p.critical_exponent() / 2.0;
    if (p.alpha() - half).abs() > 1e-12 || (p.beta() - half).abs() > 1e-12 {
        return Err(Error::OutOfRegime("synchronized states need alpha = beta = 2*/2".into()));
    }
    let nu = p.nu();
    if p.dim() == 4 {
        if nu <= 0.0 {
            return Err(Error::OutOfRegime(format!("N = 4 synchronized states need nu > 0, got {nu}")));
        }
        if (nu - 0.5).abs() < 1e-12 {
            let th = theta.ok_or_else(|| {
                Error::OutOfRegime("nu = 1/2 needs an angle theta in (0, pi/2)".into())
            })?;
            if !(th > 0.0 && th < 2.0 * FRAC_PI_4) {
                return Err(Error::OutOfRegime(format!("theta = {th} outside (0, pi/2)")));
            }
            return Ok((th.sin(), th.cos()));
        }
        let c = (1.0 + 2.0 * nu).powf(-0.5);
        return Ok((c, c));
    }
    let threshold = 2.0 / p.dim() as f64;
    if nu < threshold {
        return Err(Error::OutOfRegime(format!("N >= 5 synchronized states need nu >= {threshold}")));
    }
    let roots = solve_kl(p.dim(), nu)?;
    let k0 = roots.k0();
    Ok((k0.k.sqrt(), k0.l.sqrt()))
}

/// Synchronized ground state with the bubble centered at `center_s`.
pub fn synchronized_pair_at(
    p: &SystemParams,
    grid: &Arc<EFGrid>,
    theta: Option<f64>,
    center_s: f64,
) -> Result<StatePair> {
    let (c1, c2) = synchronized_amplitudes(p, theta)?;
    let spec = BubbleSpec::centered_at(Component::First, center_s);
    let z = bubble_ef_profile(p.dim(), p.lambda1(), &spec, grid)?;
    StatePair::new(z.scaled(c1), z.scaled(c2))
}

/// Bubble pair `(z¹, z²)` with centers at `−d/2` and `d/2`.
pub fn bubble_pair(p: &SystemParams, grid: &Arc<EFGrid>, separation: f64) -> Result<StatePair> {
    let s1 = BubbleSpec::centered_at(Component::First, -separation / 2.0);
    let s2 = BubbleSpec::centered_at(Component::Second, separation / 2.0);
    StatePair::new(
        bubble_ef_profile(p.dim(), p.lambda1(), &s1, grid)?,
        bubble_ef_profile(p.dim(), p.lambda2(), &s2, grid)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use std::f64::consts::PI;

    #[test]
    fn a_lambda_examples() {
        assert_eq!(a_lambda(4, 0.0).unwrap(), 0.0);
        assert!((a_lambda(4, 0.75).unwrap() - 0.5).abs() < 1e-15);
        assert!((a_lambda(3, 0.1875).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(a_lambda(4, 1.0), Err(Error::HardyOutOfRange { .. })));
        assert!(matches!(a_lambda(4, -0.1), Err(Error::HardyOutOfRange { .. })));
    }

    #[test]
    fn instanton_peak() {
        let g = make_grid(18.0, 4001).unwrap().shared();
        let z = bubble_ef_profile(4, 0.0, &BubbleSpec::new(Component::First, 1.0).unwrap(), &g).unwrap();
        assert!((z.values()[g.mid()] - 2f64.sqrt()).abs() < 1e-15);
        // Radial instanton 2√2/(1 + r²) at r = 1, times r^{(N−2)/2} = 1.
        assert!((2.0 * 2f64.sqrt() / 2.0 - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bubble_is_even_about_center() {
        for &(dim, lam, c) in &[(3, 0.1, 0.0), (4, 0.5, 0.0), (5, 1.0, 0.0), (6, 2.0, 0.0)] {
            let g = make_grid(12.0, 2401).unwrap().shared();
            let z = bubble_ef_profile(dim, lam, &BubbleSpec::centered_at(Component::First, c), &g).unwrap();
            let v = z.values();
            let n = v.len();
            for j in 0..n / 2 {
                assert!((v[j] - v[n - 1 - j]).abs() <= 1e-15 * v[n / 2]);
            }
        }
    }

    #[test]
    fn closed_form_sobolev_constant() {
        // S = πN(N−2)(Γ(N/2)/Γ(N))^{2/N}
        for dim in 3..=6usize {
            let n = dim as f64;
            let gamma_n: f64 = (1..dim).map(|i| i as f64).product();
            let exact = PI * n * (n - 2.0) * (crate::grid::gamma_half(dim) / gamma_n).powf(2.0 / n);
            let s = sobolev_constant(dim);
            assert!(((s - exact) / exact).abs() < 1e-12, "N={dim}: {s} vs {exact}");
        }
    }

    #[test]
    fn s_lambda_examples() {
        let s = sobolev_constant(4);
        assert_eq!(s_lambda(4, 0.0).unwrap(), s);
        assert!((s_lambda(4, 0.75).unwrap() - 0.25f64.powf(0.75) * s).abs() < 1e-14 * s);
        assert!(s_lambda(4, 1.0).is_err());
    }

    #[test]
    fn thresholds() {
        assert!((nu0(4, 0.3, 0.3).unwrap() - 0.5).abs() < 1e-15);
        assert!((nu0(3, 0.1, 0.1).unwrap() - 1.0).abs() < 1e-14);
        assert!((nu0(4, 0.3, 0.3).unwrap() - 0.5).abs() < 1e-15);
        // λ₁ = 0 is outside (0, Λ), but the ratio formula is still the
        // reference arithmetic: (1/4)[(1+4)² − 2] = 5.75.
        let rho: f64 = (1.0 - 0.0) / (1.0 - 0.75);
        assert!(((((1.0 + rho).powi(2)) - 2.0) / 4.0 - 5.75).abs() < 1e-15);
        assert!((nu0(4, 1e-300, 0.75).unwrap() - 5.75).abs() < 1e-12);
        assert!((nu1(0.4, 0.4).unwrap() - 0.25).abs() < 1e-15);
        let expected = 0.5f64 * 4.0f64.min(0.25).min((0.8f64 * 0.2).powf(0.75) / (0.8f64.powf(1.5) + 0.2f64.powf(1.5)));
        assert!((nu1(0.2, 0.8).unwrap() - expected).abs() < 1e-15);
        assert_eq!(nu1(0.2, 0.8).unwrap(), nu1(0.8, 0.2).unwrap());
        assert!(nu1(0.0, 0.5).is_err());
    }

    #[test]
    fn synchronized_coefficients() {
        let g = EFGrid::default_grid().shared();
        let p = make_params(4, 0.5, 0.5, 2.0, 2.0, 1.0).unwrap();
        let pair = synchronized_pair(&p, &g, None).unwrap();
        let z = bubble_ef_profile(4, 0.5, &BubbleSpec::centered_at(Component::First, 0.0), &g).unwrap();
        let m = g.mid();
        assert!((pair.w1.values()[m] / z.values()[m] - 3f64.powf(-0.5)).abs() < 1e-15);
        assert_eq!(pair.w1, pair.w2);

        let half = p.with_nu(0.5).unwrap();
        assert!(synchronized_pair(&half, &g, None).is_err());
        let pair = synchronized_pair(&half, &g, Some(PI / 4.0)).unwrap();
        assert!((pair.w1.values()[m] - z.values()[m] / 2f64.sqrt()).abs() < 1e-15);
        assert!((pair.w2.values()[m] - z.values()[m] / 2f64.sqrt()).abs() < 1e-15);

        let unequal = make_params(4, 0.3, 0.5, 2.0, 2.0, 1.0).unwrap();
        assert!(matches!(synchronized_pair(&unequal, &g, None), Err(Error::OutOfRegime(_))));
        let weak = SystemParams::symmetric(5, 1.0, 1.0, 0.3).unwrap();
        assert!(matches!(synchronized_pair(&weak, &g, None), Err(Error::OutOfRegime(_))));
    }
}
