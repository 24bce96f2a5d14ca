//! System parameters `(N, λ₁, λ₂, α, β, ν)` and their validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `α + β = 2N/(N−2)`.
pub const EXPONENT_TOL: f64 = 1e-12;

/// Which component of the pair a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    First,
    Second,
}

/// Best constant of the Hardy inequality, `(N−2)²/4`.
pub fn hardy_limit(dim: usize) -> f64 {
    let m = dim as f64 - 2.0;
    m * m / 4.0
}

/// Critical Sobolev exponent `2N/(N−2)`.
pub fn critical_exponent(dim: usize) -> f64 {
    2.0 * dim as f64 / (dim as f64 - 2.0)
}

/// Decay rate `sqrt(Λ_N − λ)` of the Emden–Fowler profile.
pub fn decay_rate(dim: usize, lambda: f64) -> f64 {
    (hardy_limit(dim) - lambda).sqrt()
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim < 3 {
        return Err(Error::DimensionTooSmall(dim));
    }
    Ok(())
}

/// Accepts `λ ∈ [0, Λ_N)` when `allow_zero`, `λ ∈ (0, Λ_N)` otherwise.
pub(crate) fn check_hardy(dim: usize, lambda: f64, allow_zero: bool) -> Result<()> {
    check_dim(dim)?;
    let upper = hardy_limit(dim);
    let lower_ok = if allow_zero { lambda >= 0.0 } else { lambda > 0.0 };
    if !(lambda.is_finite() && lower_ok && lambda < upper) {
        return Err(Error::HardyOutOfRange { value: lambda, lower: 0.0, upper });
    }
    Ok(())
}

/// Validated parameter tuple of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SystemParams {
    dim: usize,
    lambda1: f64,
    lambda2: f64,
    alpha: f64,
    beta: f64,
    nu: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawParams {
    #[serde(rename = "N")]
    dim: usize,
    lambda1: f64,
    lambda2: f64,
    alpha: f64,
    beta: f64,
    nu: f64,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        make_params(r.dim, r.lambda1, r.lambda2, r.alpha, r.beta, r.nu)
    }
}

impl From<SystemParams> for RawParams {
    fn from(p: SystemParams) -> Self {
        RawParams {
            dim: p.dim,
            lambda1: p.lambda1,
            lambda2: p.lambda2,
            alpha: p.alpha,
            beta: p.beta,
            nu: p.nu,
        }
    }
}

/// Validates and builds a [`SystemParams`].
pub fn make_params(
    dim: usize,
    lambda1: f64,
    lambda2: f64,
    alpha: f64,
    beta: f64,
    nu: f64,
) -> Result<SystemParams> {
    check_hardy(dim, lambda1, false)?;
    check_hardy(dim, lambda2, false)?;
    let critical = critical_exponent(dim);
    let exponents_ok = alpha.is_finite()
        && beta.is_finite()
        && alpha > 1.0
        && beta > 1.0
        && (alpha + beta - critical).abs() <= EXPONENT_TOL;
    if !exponents_ok {
        return Err(Error::ExponentMismatch { alpha, beta, critical });
    }
    if !nu.is_finite() {
        return Err(Error::BadCoupling(nu));
    }
    Ok(SystemParams { dim, lambda1, lambda2, alpha, beta, nu })
}

impl SystemParams {
    /// Symmetric exponents `α = β = 2*/2`.
    pub fn symmetric(dim: usize, lambda1: f64, lambda2: f64, nu: f64) -> Result<Self> {
        check_dim(dim)?;
        let p = critical_exponent(dim) / 2.0;
        make_params(dim, lambda1, lambda2, p, p, nu)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn lambda(&self, c: Component) -> f64 {
        match c {
            Component::First => self.lambda1,
            Component::Second => self.lambda2,
        }
    }

    /// `Λ_N = (N−2)²/4`.
    pub fn hardy_limit(&self) -> f64 {
        hardy_limit(self.dim)
    }

    /// `2* = 2N/(N−2)`.
    pub fn critical_exponent(&self) -> f64 {
        critical_exponent(self.dim)
    }

    pub fn mu1(&self) -> f64 {
        decay_rate(self.dim, self.lambda1)
    }
    pub fn mu2(&self) -> f64 {
        decay_rate(self.dim, self.lambda2)
    }
    pub fn mu(&self, c: Component) -> f64 {
        decay_rate(self.dim, self.lambda(c))
    }

    /// Same system with a different coupling strength.
    pub fn with_nu(&self, nu: f64) -> Result<Self> {
        make_params(self.dim, self.lambda1, self.lambda2, self.alpha, self.beta, nu)
    }

    /// Exchanges the roles of the two components: `(λ₁, α) ↔ (λ₂, β)`.
    pub fn swapped(&self) -> Self {
        SystemParams {
            dim: self.dim,
            lambda1: self.lambda2,
            lambda2: self.lambda1,
            alpha: self.beta,
            beta: self.alpha,
            nu: self.nu,
        }
    }
}
