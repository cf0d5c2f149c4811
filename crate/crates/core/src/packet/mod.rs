//! Lower-branch wave packets driven through the write/store/read protocol.
//!
//! Space is measured in X = x/f and time in τ = ħt/(m_ph f²), where f is the
//! initial packet width in metres. The packet is assumed to follow the lower
//! branch adiabatically while D(τ) = Δ̃/(2|g|) is ramped: transitions to the
//! upper branch are not modelled.

mod evolve;
mod grid;
mod schedule;

pub use evolve::{
    evolve, plateau_velocities, recentered_overlap, EnvelopeSnapshot, EvolveOptions, Mode,
    PlateauVelocity, ProtocolTrace, StorageDiagnostic, PHASE_STEP_LIMIT, STORAGE_RATIO_WARNING,
};
pub use grid::Grid;
pub use schedule::{default_protocol, DetuningSchedule, ProtocolShape, Segment};

use num_complex::Complex64;

use crate::bands::polariton_masses_at;
use crate::error::{invalid, Error, Result};
use crate::params::{CrystalParams, HBAR};

/// Complex envelope on a periodic [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    grid: Grid,
    amplitudes: Vec<Complex64>,
    /// k_x·f.
    carrier: f64,
    /// Physical width f, m.
    f: f64,
}

/// Norm, circular mean and circular standard deviation of |Ψ|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub norm: f64,
    pub center: f64,
    pub sigma: f64,
}

impl WavePacket {
    /// Builds a packet from raw amplitudes. `amplitudes.len()` must match the
    /// grid.
    pub fn from_amplitudes(
        grid: Grid,
        amplitudes: Vec<Complex64>,
        carrier: f64,
        f: f64,
    ) -> Result<Self> {
        if amplitudes.len() != grid.n() {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for a grid of {}",
                amplitudes.len(),
                grid.n()
            )));
        }
        if !(f > 0.0 && f.is_finite()) {
            return Err(invalid("packet width f <= 0"));
        }
        Ok(Self {
            grid,
            amplitudes,
            carrier,
            f,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn moments(&self) -> Moments {
        moments(&self.grid, &self.amplitudes)
    }

    pub fn norm(&self) -> f64 {
        self.moments().norm
    }
}

/// Circular statistics on the periodic grid: the mean is the argument of
/// ⟨e^{iθ}⟩ and the width sqrt(−2 ln R), both rescaled by L/2π.
/// For a (wrapped) Gaussian density the width equals its standard deviation.
pub(crate) fn moments(grid: &Grid, amps: &[Complex64]) -> Moments {
    let scale = grid.length() / (2.0 * std::f64::consts::PI);
    let mut total = 0.0;
    let mut phasor = Complex64::new(0.0, 0.0);
    for (j, z) in amps.iter().enumerate() {
        let w = z.norm_sqr();
        total += w;
        phasor += w * Complex64::from_polar(1.0, grid.x(j) / scale);
    }
    let r = phasor.norm() / total;
    Moments {
        norm: total * grid.dx(),
        center: scale * phasor.arg(),
        sigma: scale * (-2.0 * r.ln()).max(0.0).sqrt(),
    }
}

/// Unit-norm Gaussian centred at X = 0 whose density |Ψ|² has standard
/// deviation `width` (in units of f), carrying momentum `carrier`:
/// Ψ ∝ exp(−X²/(4·width²))·exp(i·carrier·X).
pub fn gaussian_packet(grid: &Grid, carrier: f64, width: f64, f: f64) -> Result<WavePacket> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(invalid("packet width <= 0"));
    }
    if !carrier.is_finite() || carrier.abs() >= grid.nyquist() {
        return Err(Error::InvalidArgument(format!(
            "carrier {carrier} is not below the grid Nyquist momentum {}",
            grid.nyquist()
        )));
    }
    let amps: Vec<Complex64> = (0..grid.n())
        .map(|j| {
            let x = grid.x(j);
            Complex64::from_polar((-x * x / (4.0 * width * width)).exp(), carrier * x)
        })
        .collect();
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx();
    let scale = 1.0 / norm.sqrt();
    let amps = amps.into_iter().map(|z| z * scale).collect();
    WavePacket::from_amplitudes(grid.clone(), amps, carrier, f)
}

/// Lower-branch mass for normalised detuning D, i.e. Δ̃ = 2|g|·D.
pub fn mass_of_detuning(p: &CrystalParams, d: f64) -> f64 {
    polariton_masses_at(p, 2.0 * p.g.abs() * d).1
}

/// τ_b = m₂f²/ħ, s.
pub fn broadening_time(m2: f64, f: f64) -> Result<f64> {
    if !(m2 > 0.0 && m2.is_finite()) {
        return Err(invalid("m2 <= 0"));
    }
    if !(f > 0.0 && f.is_finite()) {
        return Err(invalid("f <= 0"));
    }
    Ok(m2 * f * f / HBAR)
}

/// Seconds per unit of normalised time, m_ph f²/ħ.
pub fn time_unit(p: &CrystalParams, f: f64) -> f64 {
    p.m_ph() * f * f / HBAR
}
