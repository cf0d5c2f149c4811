//! Physical constants and the parameter set of a 1D polaritonic crystal.
//!
//! Everything in here is SI: rad/s for frequencies and hopping rates, metres,
//! kilograms and seconds. Unit conversion from GHz/THz/μm happens only in the
//! command-line front end.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// CODATA 2018 exact/recommended values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Speed of light, m/s.
    pub c: f64,
}

pub const HBAR: f64 = 1.054_571_817e-34;
pub const K_B: f64 = 1.380_649e-23;
pub const C: f64 = 2.997_924_58e8;

pub const CODATA: PhysicalConstants = PhysicalConstants {
    hbar: HBAR,
    k_b: K_B,
    c: C,
};

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA
    }
}

/// Physical inputs of the crystal.
///
/// `g` already carries the collective √N enhancement. `beta` is the effective
/// atomic hopping β_b − β_a and `omega_ab` the bare transition frequency
/// ω_b − ω_a of a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalParams {
    /// Number of cells on the periodic ring.
    pub cells: usize,
    /// Lattice constant, m.
    pub l: f64,
    /// Atom–photon coupling, rad/s.
    pub g: f64,
    /// Photon inter-cell hopping, rad/s.
    pub alpha: f64,
    /// Effective atomic inter-cell hopping, rad/s.
    pub beta: f64,
    /// Bare cavity frequency, rad/s.
    pub omega_ph: f64,
    /// Bare atomic transition frequency, rad/s.
    pub omega_ab: f64,
}

/// Scales derived from a [`CrystalParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Effective mass of the atomic band, ħ/(2βl²), kg.
    pub m_at: f64,
    /// Effective mass of the photonic band, ħ/(2αl²), kg.
    pub m_ph: f64,
    /// Bare detuning ω_ab − ω_ph, rad/s.
    pub delta: f64,
    /// Effective detuning Δ − 2(β − α), rad/s.
    pub delta_tilde: f64,
}

/// Hopping rate of a cosine band with curvature mass `mass` on a lattice of
/// constant `l`.
pub fn hopping_from_mass(mass: f64, l: f64) -> f64 {
    HBAR / (2.0 * mass * l * l)
}

pub fn mass_from_hopping(hopping: f64, l: f64) -> f64 {
    HBAR / (2.0 * hopping * l * l)
}

fn require_positive(value: f64, name: &str) -> Result<()> {
    if value.is_nan() {
        return Err(invalid(format!("{name} is NaN")));
    }
    if value <= 0.0 {
        return Err(invalid(format!("{name} <= 0")));
    }
    if !value.is_finite() {
        return Err(invalid(format!("{name} is not finite")));
    }
    Ok(())
}

impl CrystalParams {
    /// Builds a parameter set from band masses instead of hopping rates.
    pub fn from_masses(
        cells: usize,
        l: f64,
        g: f64,
        m_ph: f64,
        m_at: f64,
        omega_ph: f64,
        omega_ab: f64,
    ) -> Result<Self> {
        require_positive(l, "l")?;
        require_positive(m_ph, "m_ph")?;
        require_positive(m_at, "m_at")?;
        Self {
            cells,
            l,
            g,
            alpha: hopping_from_mass(m_ph, l),
            beta: hopping_from_mass(m_at, l),
            omega_ph,
            omega_ab,
        }
        .validate()
    }

    /// Returns `self` unchanged if every invariant holds, otherwise an error
    /// naming the first violated one.
    pub fn validate(self) -> Result<Self> {
        if self.cells < 3 {
            return Err(invalid("M < 3"));
        }
        require_positive(self.l, "l")?;
        require_positive(self.g, "g")?;
        require_positive(self.alpha, "alpha")?;
        require_positive(self.beta, "beta")?;
        require_positive(self.omega_ph, "omega_ph")?;
        require_positive(self.omega_ab, "omega_ab")?;
        if !self.detuning().is_finite() {
            return Err(invalid("detuning is not finite"));
        }
        Ok(self)
    }

    /// Bare detuning Δ = ω_ab − ω_ph.
    pub fn detuning(&self) -> f64 {
        self.omega_ab - self.omega_ph
    }

    /// Effective detuning Δ̃ = Δ − 2(β − α).
    pub fn effective_detuning(&self) -> f64 {
        self.detuning() - 2.0 * (self.beta - self.alpha)
    }

    pub fn m_ph(&self) -> f64 {
        mass_from_hopping(self.alpha, self.l)
    }

    pub fn m_at(&self) -> f64 {
        mass_from_hopping(self.beta, self.l)
    }

    /// Copy of `self` with the bare cavity frequency shifted so that the
    /// effective detuning equals `delta_tilde`. Hoppings and coupling are kept.
    pub fn with_effective_detuning(&self, delta_tilde: f64) -> Self {
        let delta = delta_tilde + 2.0 * (self.beta - self.alpha);
        Self {
            omega_ph: self.omega_ab - delta,
            ..*self
        }
    }

    pub fn with_cells(&self, cells: usize) -> Self {
        Self { cells, ..*self }
    }
}

pub fn validate_params(p: CrystalParams) -> Result<CrystalParams> {
    p.validate()
}

pub fn derive_scales(p: &CrystalParams) -> DerivedScales {
    DerivedScales {
        m_at: p.m_at(),
        m_ph: p.m_ph(),
        delta: p.detuning(),
        delta_tilde: p.effective_detuning(),
    }
}

/// κ·τ_coh. The lattice model is only trustworthy when this is ≫ 1; nothing in
/// the crate gates on it.
pub fn strong_coupling_ratio(kappa: f64, tau_coh: f64) -> Result<f64> {
    require_positive(kappa, "kappa")?;
    require_positive(tau_coh, "tau_coh")?;
    Ok(kappa * tau_coh)
}

/// On-disk parameter document. Exactly one of `alpha_rad_s` / `m_ph_kg` and
/// one of `beta_rad_s` / `m_at_kg` must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    #[serde(rename = "M")]
    pub m: usize,
    pub l_m: f64,
    pub g_rad_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_rad_s: Option<f64>,
    pub omega_ph_rad_s: f64,
    pub omega_ab_rad_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_ph_kg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_at_kg: Option<f64>,
}

impl ParamsFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("parameter file: {e}")))
    }

    pub fn resolve(&self) -> Result<CrystalParams> {
        let hopping = |rate: Option<f64>, mass: Option<f64>, rate_key: &str, mass_key: &str| match (
            rate, mass,
        ) {
            (Some(r), None) => Ok(r),
            (None, Some(m)) => {
                require_positive(m, mass_key)?;
                require_positive(self.l_m, "l")?;
                Ok(hopping_from_mass(m, self.l_m))
            }
            (Some(_), Some(_)) => Err(Error::Config(format!(
                "both {rate_key} and {mass_key} given; use one"
            ))),
            (None, None) => Err(Error::Config(format!("missing {rate_key} (or {mass_key})"))),
        };
        let alpha = hopping(self.alpha_rad_s, self.m_ph_kg, "alpha_rad_s", "m_ph_kg")?;
        let beta = hopping(self.beta_rad_s, self.m_at_kg, "beta_rad_s", "m_at_kg")?;
        CrystalParams {
            cells: self.m,
            l: self.l_m,
            g: self.g_rad_s,
            alpha,
            beta,
            omega_ph: self.omega_ph_rad_s,
            omega_ab: self.omega_ab_rad_s,
        }
        .validate()
    }
}

impl From<&CrystalParams> for ParamsFile {
    fn from(p: &CrystalParams) -> Self {
        Self {
            m: p.cells,
            l_m: p.l,
            g_rad_s: p.g,
            alpha_rad_s: Some(p.alpha),
            beta_rad_s: Some(p.beta),
            omega_ph_rad_s: p.omega_ph,
            omega_ab_rad_s: p.omega_ab,
            m_ph_kg: None,
            m_at_kg: None,
        }
    }
}

pub mod presets {
    //! Parameter sets bundled with the crate.

    use super::{CrystalParams, ParamsFile};

    /// Reference crystal: 500 THz transition on resonance with the cavity,
    /// g/2π = 2 GHz, band masses 5e-36 kg / 38.5e-27 kg, l = 2.24 μm.
    pub const FIG2_JSON: &str = include_str!("../presets/fig2.json");

    /// Order-unity rates for oracle and property checks.
    pub const REDUCED_JSON: &str = include_str!("../presets/reduced.json");

    pub fn lookup(name: &str) -> Option<&'static str> {
        match name.trim_end_matches(".json") {
            "fig2" => Some(FIG2_JSON),
            "reduced" => Some(REDUCED_JSON),
            _ => None,
        }
    }

    pub fn fig2() -> CrystalParams {
        ParamsFile::from_json(FIG2_JSON)
            .and_then(|f| f.resolve())
            .expect("bundled fig2 preset is valid")
    }

    pub fn reduced() -> CrystalParams {
        ParamsFile::from_json(REDUCED_JSON)
            .and_then(|f| f.resolve())
            .expect("bundled reduced preset is valid")
    }
}
