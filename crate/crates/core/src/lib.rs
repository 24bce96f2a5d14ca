//! Ground states and least-energy levels of the doubly critical coupled
//! Schrödinger system with Hardy potentials,
//!
//! ```text
//! −Δu − λ₁u/|x|² = u^{2*−1} + να u^{α−1} v^β,
//! −Δv − λ₂v/|x|² = v^{2*−1} + νβ u^α v^{β−1},     u, v ∈ D^{1,2}(ℝ^N),
//! ```
//!
//! computed for radial states in Emden–Fowler coordinates
//! `u(r) = r^{−(N−2)/2} w(ln r)`, together with the closed-form solutions,
//! constants and thresholds the numerics are checked against.

pub mod closed_form;
pub mod error;
pub mod functional;
pub mod grid;
pub mod minimize;
pub mod nehari;
pub mod params;
pub mod profile;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{make_grid, sphere_area, EFGrid};
pub use params::{make_params, Component, SystemParams};
pub use profile::{Profile, StatePair};
