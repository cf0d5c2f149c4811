//! Quantum-degeneracy diagnostics for the 1D lower-polariton gas.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::params::{HBAR, K_B};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasState {
    /// Linear density, 1/m.
    pub n1: f64,
    /// Temperature, K.
    pub t: f64,
    /// Lower-polariton mass, kg.
    pub m2: f64,
}

fn positive(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

impl GasState {
    pub fn new(n1: f64, t: f64, m2: f64) -> Result<Self> {
        positive(n1, "n1")?;
        positive(t, "T")?;
        positive(m2, "m2")?;
        Ok(Self { n1, t, m2 })
    }
}

/// T_d = 2πħ²n₁²/(m₂k_B).
pub fn degeneracy_temperature(n1: f64, m2: f64) -> Result<f64> {
    positive(n1, "n1")?;
    positive(m2, "m2")?;
    Ok(2.0 * PI * HBAR * HBAR * n1 * n1 / (m2 * K_B))
}

/// Λ_T = sqrt(2πħ²/(m₂k_BT)).
pub fn thermal_wavelength(m2: f64, t: f64) -> Result<f64> {
    positive(m2, "m2")?;
    positive(t, "T")?;
    Ok((2.0 * PI * HBAR * HBAR / (m2 * K_B * t)).sqrt())
}

/// n₁Λ_T; values ≫ 1 mean a strongly degenerate gas.
pub fn degeneracy_parameter(s: &GasState) -> Result<f64> {
    Ok(s.n1 * thermal_wavelength(s.m2, s.t)?)
}
