//! Sampled Emden–Fowler profiles `w(s)`, representing radial functions
//! `u(r) = r^{−(N−2)/2} w(ln r)`, and pairs of them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::EFGrid;

/// Boundary values above this fraction of the maximum are flagged.
pub const BOUNDARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: Arc<EFGrid>,
    values: Vec<f64>,
}

impl Profile {
    pub fn new(grid: Arc<EFGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Profile { grid, values })
    }

    pub fn zeros(grid: Arc<EFGrid>) -> Self {
        let n = grid.len();
        Profile { grid, values: vec![0.0; n] }
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(grid: Arc<EFGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Profile::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<EFGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &Profile) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Index of the largest `|w|`; the first one on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, v) in self.values.iter().enumerate() {
            if v.abs() > self.values[best].abs() {
                best = j;
            }
        }
        best
    }

    /// `max(|w(s_min)|, |w(s_max)|) / max|w|`; zero for the zero profile.
    pub fn boundary_defect(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        let n = self.values.len();
        self.values[0].abs().max(self.values[n - 1].abs()) / m
    }

    pub fn scaled(&self, c: f64) -> Profile {
        Profile { grid: self.grid.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    /// Translation by `cells` grid cells (positive moves mass to larger s),
    /// filling with zeros.
    pub fn shifted(&self, cells: isize) -> Profile {
        let n = self.values.len() as isize;
        let values = (0..n)
            .map(|j| {
                let src = j - cells;
                if (0..n).contains(&src) {
                    self.values[src as usize]
                } else {
                    0.0
                }
            })
            .collect();
        Profile { grid: self.grid.clone(), values }
    }

    /// Discrete `L²(ds)` norm with the uniform interior weights used by the
    /// energy functional.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        let n = self.values.len();
        (h * self.values[1..n - 1].iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// `∫ s w² / ∫ w²`; `None` for the zero profile.
    pub fn mass_center(&self) -> Option<f64> {
        let (mut m0, mut m1) = (0.0, 0.0);
        for (j, v) in self.values.iter().enumerate() {
            let w2 = v * v;
            m0 += w2;
            m1 += w2 * self.grid.point(j);
        }
        (m0 > 0.0).then(|| m1 / m0)
    }
}

/// Two profiles on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub w1: Profile,
    pub w2: Profile,
}

impl StatePair {
    pub fn new(w1: Profile, w2: Profile) -> Result<Self> {
        if !w1.same_grid(&w2) {
            return Err(Error::GridMismatch);
        }
        Ok(StatePair { w1, w2 })
    }

    pub fn zeros(grid: Arc<EFGrid>) -> Self {
        StatePair { w1: Profile::zeros(grid.clone()), w2: Profile::zeros(grid) }
    }

    pub fn grid(&self) -> &Arc<EFGrid> {
        self.w1.grid()
    }

    pub fn is_zero(&self) -> bool {
        self.w1.is_zero() && self.w2.is_zero()
    }

    pub fn scaled(&self, t: f64, s: f64) -> StatePair {
        StatePair { w1: self.w1.scaled(t), w2: self.w2.scaled(s) }
    }

    pub fn shifted(&self, cells: isize) -> StatePair {
        StatePair { w1: self.w1.shifted(cells), w2: self.w2.shifted(cells) }
    }

    pub fn swapped(&self) -> StatePair {
        StatePair { w1: self.w2.clone(), w2: self.w1.clone() }
    }

    /// Index of the largest `w₁² + w₂²`.
    pub fn peak_index(&self) -> usize {
        let a = self.w1.values();
        let b = self.w2.values();
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for j in 0..a.len() {
            let v = a[j] * a[j] + b[j] * b[j];
            if v > best_val {
                best_val = v;
                best = j;
            }
        }
        best
    }

    /// Distance in `s` between the maxima of the two components.
    pub fn separation(&self) -> f64 {
        let h = self.grid().spacing();
        (self.w1.argmax() as f64 - self.w2.argmax() as f64).abs() * h
    }

    pub fn boundary_defect(&self) -> f64 {
        self.w1.boundary_defect().max(self.w2.boundary_defect())
    }

    /// Largest absolute entry-wise difference.
    pub fn max_diff(&self, other: &StatePair) -> f64 {
        let d = |a: &Profile, b: &Profile| {
            a.values().iter().zip(b.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        };
        d(&self.w1, &other.w1).max(d(&self.w2, &other.w2))
    }

    /// Discrete `L²` distance `sqrt(‖w₁−v₁‖² + ‖w₂−v₂‖²)`.
    pub fn l2_distance(&self, other: &StatePair) -> f64 {
        let h = self.grid().spacing();
        let sq = |a: &Profile, b: &Profile| {
            a.values().iter().zip(b.values()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
        };
        (h * (sq(&self.w1, &other.w1) + sq(&self.w2, &other.w2))).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn grid() -> Arc<EFGrid> {
        make_grid(4.0, 9).unwrap().shared()
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            Profile::new(grid(), vec![0.0; 3]),
            Err(Error::LengthMismatch { expected: 9, got: 3 })
        ));
        let mut v = vec![0.0; 9];
        v[3] = f64::NAN;
        assert!(matches!(Profile::new(grid(), v), Err(Error::NonFinite)));
        let other = make_grid(5.0, 9).unwrap().shared();
        assert!(matches!(
            StatePair::new(Profile::zeros(grid()), Profile::zeros(other)),
            Err(Error::GridMismatch)
        ));
        // equal but distinct grids are accepted
        assert!(StatePair::new(Profile::zeros(grid()), Profile::zeros(grid())).is_ok());
    }

    #[test]
    fn shift_and_peaks() {
        let p = Profile::from_fn(grid(), |s| (-(s - 1.0) * (s - 1.0)).exp()).unwrap();
        assert_eq!(p.argmax(), 5);
        let q = p.shifted(-1);
        assert_eq!(q.argmax(), 4);
        assert_eq!(q.values()[8], 0.0);
        assert!((p.mass_center().unwrap() - 1.0).abs() < 0.05);
        let pair = StatePair::new(p.clone(), q).unwrap();
        assert!((pair.separation() - 1.0).abs() < 1e-15);
        assert!(p.boundary_defect() > 0.0);
        assert_eq!(Profile::zeros(grid()).boundary_defect(), 0.0);
    }
}
