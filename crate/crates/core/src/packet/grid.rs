use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic grid in the normalised coordinate X = x/f.
///
/// Points sit at X_j = −L/2 + j·dx so that X = 0 is sample `n/2`. The dual
/// momenta κ_j (units 1/f) use the usual transform ordering: non-negative
/// frequencies first, then the negative ones.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid size {n} must be a power of two >= {}",
                Self::MIN_POINTS
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid length {length} must be positive"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            length,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn origin_index(&self) -> usize {
        self.n / 2
    }

    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn kappa(&self, j: usize) -> f64 {
        let signed = if j < self.n / 2 {
            j as f64
        } else {
            j as f64 - self.n as f64
        };
        2.0 * PI * signed / self.length
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.kappa(j)).collect()
    }

    /// Largest resolvable |κ|, π·n/L.
    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / self.length
    }

    /// In-place unnormalised forward transform.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// In-place inverse transform including the 1/n factor.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / self.n as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(8, 1.0).is_err());
        assert!(Grid::new(48, 1.0).is_err());
        assert!(Grid::new(64, 0.0).is_err());
        assert!(Grid::new(64, 10.0).is_ok());
    }

    #[test]
    fn layout() {
        let g = Grid::new(16, 8.0).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.x(0), -4.0);
        assert_eq!(g.x(g.origin_index()), 0.0);
        assert_eq!(g.kappa(1), 2.0 * PI / 8.0);
        assert_eq!(g.kappa(15), -2.0 * PI / 8.0);
        assert_eq!(g.kappa(8), -g.nyquist());
    }

    #[test]
    fn transform_matches_direct_sum() {
        let g = Grid::new(32, 4.0).unwrap();
        let data: Vec<Complex64> = (0..32)
            .map(|j| Complex64::new((j as f64 * 0.3).sin(), (j as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        g.forward(&mut fast);
        for (m, z) in fast.iter().enumerate() {
            let direct: Complex64 = data
                .iter()
                .enumerate()
                .map(|(j, x)| x * Complex64::from_polar(1.0, -2.0 * PI * (j * m) as f64 / 32.0))
                .sum();
            assert!((z - direct).norm() < 1e-12);
        }
        g.inverse(&mut fast);
        for (a, b) in fast.iter().zip(&data) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
