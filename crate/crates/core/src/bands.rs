//! Analytic k-space physics of the crystal: bare cosine bands, the two
//! polariton branches, Hopfield fractions, effective masses and group
//! velocities.
//!
//! Point evaluations take a quasi-momentum `k` in rad/m and never fold it into
//! the first zone; only [`band_scan`] restricts itself to kl ∈ [−π, π].

use std::io::Write;

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::params::{CrystalParams, HBAR};

/// Polariton branch. `Upper` always has the larger frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    /// Branch 1 is the upper polariton, branch 2 the lower one.
    pub fn from_index(i: u32) -> Option<Self> {
        match i {
            1 => Some(Branch::Upper),
            2 => Some(Branch::Lower),
            _ => None,
        }
    }
}

/// Closed-form velocity approximations for the lower branch at small k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Δ̃ ≫ 2|g|: the lower polariton moves like a lattice photon.
    Photon,
    /// β/α ≪ g²/Δ̃² with Δ̃ ≪ −2|g|.
    Intermediate,
    /// g²/Δ̃² ≪ β/α: the lower polariton moves like a lattice atom.
    Atom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSample {
    pub k: f64,
    pub kl: f64,
    pub omega_ph_k: f64,
    pub omega_at_k: f64,
    pub delta_omega: f64,
    /// Upper branch, rad/s.
    pub omega_1: f64,
    /// Lower branch, rad/s.
    pub omega_2: f64,
    pub mu1_sq: f64,
    pub mu2_sq: f64,
    pub v1: f64,
    pub v2: f64,
}

/// (ω_ph(k), ω_at(k)).
pub fn bare_dispersions(p: &CrystalParams, k: f64) -> (f64, f64) {
    let c = (k * p.l).cos();
    (
        p.omega_ph - 2.0 * p.alpha * c,
        p.omega_ab - 2.0 * p.beta * c,
    )
}

/// δω(k) = ω_at(k) − ω_ph(k) = Δ − 2(β − α)cos(kl).
pub fn delta_omega(p: &CrystalParams, k: f64) -> f64 {
    p.detuning() - 2.0 * (p.beta - p.alpha) * (k * p.l).cos()
}

/// Gap between the branches, sqrt(δω² + 4g²).
pub fn rabi_splitting(p: &CrystalParams, k: f64) -> f64 {
    delta_omega(p, k).hypot(2.0 * p.g)
}

/// (Ω₁, Ω₂) with Ω₁ ≥ Ω₂.
pub fn branch_frequencies(p: &CrystalParams, k: f64) -> (f64, f64) {
    let (w_ph, w_at) = bare_dispersions(p, k);
    let mean = 0.5 * (w_ph + w_at);
    let half_gap = 0.5 * rabi_splitting(p, k);
    (mean + half_gap, mean - half_gap)
}

/// Squared Hopfield amplitudes ½[1 ∓ δω/S] for detuning `dw` and coupling
/// `g`, with S = sqrt(δω² + 4g²).
///
/// The smaller fraction is evaluated as 2g²/(S(S + |δω|)).
pub fn hopfield_from_detuning(dw: f64, g: f64) -> (f64, f64) {
    let s = dw.hypot(2.0 * g);
    if s == 0.0 {
        return (0.5, 0.5);
    }
    let small = 2.0 * g * g / (s * (s + dw.abs()));
    let large = 0.5 * (s + dw.abs()) / s;
    if dw >= 0.0 {
        (small, large)
    } else {
        (large, small)
    }
}

/// (μ₁², μ₂²). μ₁² is the photon weight of the upper branch and the atomic
/// weight of the lower one.
pub fn hopfield_fractions(p: &CrystalParams, k: f64) -> (f64, f64) {
    hopfield_from_detuning(delta_omega(p, k), p.g)
}

/// S + Δ̃ and S − Δ̃ without cancellation.
fn split_sum(s: f64, x: f64, g: f64) -> (f64, f64) {
    let four_g2 = 4.0 * g * g;
    if x >= 0.0 {
        (s + x, four_g2 / (s + x))
    } else {
        (four_g2 / (s - x), s - x)
    }
}

/// Curvature masses (m₁, m₂) of the two branches at k = 0 for an arbitrary
/// effective detuning.
pub fn polariton_masses_at(p: &CrystalParams, delta_tilde: f64) -> (f64, f64) {
    let (m_at, m_ph) = (p.m_at(), p.m_ph());
    let s = delta_tilde.hypot(2.0 * p.g);
    let (s_plus, s_minus) = split_sum(s, delta_tilde, p.g);
    // (m_at + m_ph)S ∓ (m_at − m_ph)Δ̃ regrouped by mass.
    let upper_den = m_at * s_minus + m_ph * s_plus;
    let lower_den = m_at * s_plus + m_ph * s_minus;
    let num = 2.0 * m_at * m_ph * s;
    (num / upper_den, num / lower_den)
}

/// Upper and lower polariton masses at the crystal's own effective detuning.
pub fn polariton_masses(p: &CrystalParams) -> (f64, f64) {
    polariton_masses_at(p, p.effective_detuning())
}

/// Lower-branch mass on resonance, 2m_ph/(1 + m_ph/m_at).
pub fn resonant_lower_mass(m_ph: f64, m_at: f64) -> f64 {
    2.0 * m_ph / (1.0 + m_ph / m_at)
}

/// ∂Ω/∂k in m/s.
///
/// Evaluated as 2l·sin(kl)·(α·w_ph + β·w_at) with the branch's photon and
/// atom weights.
pub fn group_velocity(p: &CrystalParams, k: f64, branch: Branch) -> f64 {
    let (mu1_sq, mu2_sq) = hopfield_fractions(p, k);
    let (w_ph, w_at) = match branch {
        Branch::Upper => (mu1_sq, mu2_sq),
        Branch::Lower => (mu2_sq, mu1_sq),
    };
    2.0 * p.l * (k * p.l).sin() * (p.alpha * w_ph + p.beta * w_at)
}

/// Lower-branch group velocity from the regime-specific closed forms.
pub fn regime_velocity(p: &CrystalParams, k: f64, regime: Regime) -> Result<f64> {
    let l2k = p.l * p.l * k;
    match regime {
        Regime::Photon => Ok(2.0 * p.alpha * l2k),
        Regime::Intermediate => {
            let dt = p.effective_detuning();
            if dt == 0.0 {
                return Err(Error::InvalidArgument(
                    "intermediate regime needs a nonzero effective detuning".into(),
                ));
            }
            Ok(2.0 * p.alpha * l2k * p.g * p.g / (dt * dt))
        }
        Regime::Atom => Ok(2.0 * p.beta * l2k),
    }
}

/// Ω₂(k) − Ω₂(0) for effective detuning `delta_tilde`, in half-angle form
/// with no absolute optical frequency.
pub fn lower_branch_offset(p: &CrystalParams, k: f64, delta_tilde: f64) -> f64 {
    let half = (0.5 * k * p.l).sin();
    let s2 = half * half;
    let two_g = 2.0 * p.g;
    let dw0 = delta_tilde;
    let ddw = 4.0 * (p.beta - p.alpha) * s2;
    let dw = dw0 + ddw;
    let gap0 = dw0.hypot(two_g);
    let gap = dw.hypot(two_g);
    let bare = 4.0 * (p.alpha + p.beta) * s2;
    let gap_change = ddw * (dw + dw0) / (gap + gap0);
    0.5 * (bare - gap_change)
}

/// ħ k / m, handy for comparing against the curvature masses.
pub fn free_particle_velocity(k: f64, mass: f64) -> f64 {
    HBAR * k / mass
}

pub fn sample(p: &CrystalParams, k: f64) -> BandSample {
    let (omega_ph_k, omega_at_k) = bare_dispersions(p, k);
    let (omega_1, omega_2) = branch_frequencies(p, k);
    let (mu1_sq, mu2_sq) = hopfield_fractions(p, k);
    BandSample {
        k,
        kl: k * p.l,
        omega_ph_k,
        omega_at_k,
        delta_omega: delta_omega(p, k),
        omega_1,
        omega_2,
        mu1_sq,
        mu2_sq,
        v1: group_velocity(p, k, Branch::Upper),
        v2: group_velocity(p, k, Branch::Lower),
    }
}

/// Uniform scan of the first Brillouin zone, kl from −π to π inclusive, in
/// increasing k.
pub fn band_scan(p: &CrystalParams, n_points: usize) -> Result<Vec<BandSample>> {
    if n_points < 2 {
        return Err(Error::InvalidArgument("n_points < 2".into()));
    }
    let last = (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| {
            // Integer numerator keeps kl = 0 and ±π exact and the grid mirror
            // symmetric.
            let kl = std::f64::consts::PI * (2.0 * i as f64 - last) / last;
            BandSample {
                kl,
                ..sample(p, kl / p.l)
            }
        })
        .collect())
}

pub const BAND_CSV_HEADER: &str =
    "kl,omega_ph_k,omega_at_k,delta_omega,Omega_1,Omega_2,mu1_sq,mu2_sq,v1,v2";

pub fn write_band_csv<W: Write>(mut out: W, samples: &[BandSample]) -> std::io::Result<()> {
    writeln!(out, "{BAND_CSV_HEADER}")?;
    for s in samples {
        let row = [
            s.kl,
            s.omega_ph_k,
            s.omega_at_k,
            s.delta_omega,
            s.omega_1,
            s.omega_2,
            s.mu1_sq,
            s.mu2_sq,
            s.v1,
            s.v2,
        ];
        let fields: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
