use std::f64::consts::FRAC_PI_4;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    broadening_time, mass_of_detuning, moments, time_unit, DetuningSchedule, Grid, WavePacket,
};
use crate::bands::lower_branch_offset;
use crate::error::{Error, Result};
use crate::params::CrystalParams;

/// Largest phase any mode may pick up in one step, rad.
pub const PHASE_STEP_LIMIT: f64 = FRAC_PI_4;

/// t_stor/τ_b above which the storage interval is flagged as too long.
pub const STORAGE_RATIO_WARNING: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Exact lower-branch dispersion Ω₂(k) − Ω₂(0).
    FullBand,
    /// Free particle with mass m₂(D): (m_ph/m₂)·κ²/2.
    Parabolic,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-band" | "full" => Ok(Mode::FullBand),
            "parabolic" => Ok(Mode::Parabolic),
            other => Err(Error::Config(format!(
                "unknown mode '{other}' (expected full-band or parabolic)"
            ))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::FullBand => "full-band",
            Mode::Parabolic => "parabolic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub mode: Mode,
    /// Uniform steps per schedule segment; snapshot times split a step.
    pub steps_per_segment: usize,
    /// Record a trace point every this many steps. Segment ends and
    /// snapshots are always recorded.
    pub trace_every: usize,
    /// τ values at which the envelope S(X, τ) is stored.
    pub snapshot_times: Vec<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Parabolic,
            steps_per_segment: 2000,
            trace_every: 10,
            snapshot_times: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSnapshot {
    pub tau: f64,
    /// |Ψ(X, τ)|²/|Ψ(0, 0)|² on the grid positions.
    pub envelope: Vec<f64>,
}

/// Storage-time check t_stor ≪ τ_b for the most negative detuning of the
/// schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StorageDiagnostic {
    pub t_stor_s: f64,
    pub tau_b_s: f64,
    pub ratio: f64,
    pub m2_store_kg: f64,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTrace {
    pub mode: Mode,
    pub times: Vec<f64>,
    /// Circular mean of |Ψ|², unwrapped across the periodic boundary.
    pub centers: Vec<f64>,
    pub widths: Vec<f64>,
    pub norms: Vec<f64>,
    pub snapshots: Vec<EnvelopeSnapshot>,
    pub final_state: WavePacket,
    pub storage: StorageDiagnostic,
}

impl ProtocolTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_norm_error(&self) -> f64 {
        self.norms
            .iter()
            .map(|n| (n - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-mode phase increment for one step of length `dtau` at detuning `d`.
struct PhaseKernel<'a> {
    mode: Mode,
    params: &'a CrystalParams,
    /// κ_j²/2 for the parabolic model, k_j = κ_j/f for the full band.
    table: Vec<f64>,
    seconds_per_tau: f64,
}

impl<'a> PhaseKernel<'a> {
    fn new(mode: Mode, params: &'a CrystalParams, grid: &Grid, f: f64) -> Self {
        let table = match mode {
            Mode::Parabolic => grid.momenta().iter().map(|k| 0.5 * k * k).collect(),
            Mode::FullBand => grid.momenta().iter().map(|k| k / f).collect(),
        };
        Self {
            mode,
            params,
            table,
            seconds_per_tau: time_unit(params, f),
        }
    }

    fn step(&self, d: f64, dtau: f64, out: &mut [f64]) {
        match self.mode {
            Mode::Parabolic => {
                let ratio = self.params.m_ph() / mass_of_detuning(self.params, d);
                for (o, half_k2) in out.iter_mut().zip(&self.table) {
                    *o = ratio * half_k2 * dtau;
                }
            }
            Mode::FullBand => {
                let delta_tilde = 2.0 * self.params.g.abs() * d;
                let scale = self.seconds_per_tau * dtau;
                for (o, &k) in out.iter_mut().zip(&self.table) {
                    *o = lower_branch_offset(self.params, k, delta_tilde) * scale;
                }
            }
        }
    }
}

struct Recorder {
    trace_times: Vec<f64>,
    centers: Vec<f64>,
    widths: Vec<f64>,
    norms: Vec<f64>,
    snapshots: Vec<EnvelopeSnapshot>,
    reference_density: f64,
}

impl Recorder {
    fn record(&mut self, grid: &Grid, tau: f64, amps: &[Complex64], snapshot: bool) {
        let m = moments(grid, amps);
        let center = match self.centers.last() {
            Some(&prev) => {
                let l = grid.length();
                m.center + l * ((prev - m.center) / l).round()
            }
            None => m.center,
        };
        self.trace_times.push(tau);
        self.centers.push(center);
        self.widths.push(m.sigma);
        self.norms.push(m.norm);
        if snapshot {
            self.snapshots.push(EnvelopeSnapshot {
                tau,
                envelope: amps
                    .iter()
                    .map(|z| z.norm_sqr() / self.reference_density)
                    .collect(),
            });
        }
    }
}

fn materialize(grid: &Grid, spectrum: &[Complex64], phase: &[f64], buf: &mut Vec<Complex64>) {
    buf.clear();
    buf.extend(
        spectrum
            .iter()
            .zip(phase)
            .map(|(z, &ph)| z * Complex64::from_polar(1.0, -ph)),
    );
    grid.inverse(buf);
}

pub fn storage_diagnostic(
    schedule: &DetuningSchedule,
    p: &CrystalParams,
    f: f64,
) -> Result<StorageDiagnostic> {
    let d_min = schedule
        .segments()
        .iter()
        .flat_map(|s| [s.d_start, s.d_end])
        .fold(f64::INFINITY, f64::min);
    let m2_store = mass_of_detuning(p, d_min);
    let tau_b_s = broadening_time(m2_store, f)?;
    let t_stor_s = schedule.time_below_zero() * time_unit(p, f);
    let ratio = t_stor_s / tau_b_s;
    let warning = (ratio > STORAGE_RATIO_WARNING).then(|| {
        format!(
            "storage time is {ratio:.3} of the broadening time; the packet will not keep its shape"
        )
    });
    Ok(StorageDiagnostic {
        t_stor_s,
        tau_b_s,
        ratio,
        m2_store_kg: m2_store,
        warning,
    })
}

/// Evolves `packet` along `schedule`.
///
/// The lower-branch Hamiltonian is diagonal in momentum at every instant, so
/// each mode only accumulates a phase: the packet is transformed once, the
/// per-step phases (D sampled at the step midpoint, Ω₂(0) removed) are summed,
/// and real-space states are rebuilt only where something is recorded.
pub fn evolve(
    packet: &WavePacket,
    schedule: &DetuningSchedule,
    p: &CrystalParams,
    opts: &EvolveOptions,
) -> Result<ProtocolTrace> {
    if opts.steps_per_segment == 0 {
        return Err(Error::InvalidArgument(
            "steps_per_segment must be >= 1".into(),
        ));
    }
    let tau_final = schedule.tau_final();
    let mut snaps: Vec<f64> = opts.snapshot_times.clone();
    if let Some(bad) = snaps.iter().find(|t| !(0.0..=tau_final).contains(*t)) {
        return Err(Error::InvalidArgument(format!(
            "snapshot time {bad} outside [0, {tau_final}]"
        )));
    }
    snaps.sort_by(f64::total_cmp);
    snaps.dedup();

    let grid = packet.grid();
    let n = grid.n();
    let mut spectrum = packet.amplitudes().to_vec();
    grid.forward(&mut spectrum);

    let kernel = PhaseKernel::new(opts.mode, p, grid, packet.f());
    let mut total_phase = vec![0.0; n];
    let mut step_phase = vec![0.0; n];
    let mut buf = Vec::with_capacity(n);

    let mut rec = Recorder {
        trace_times: Vec::new(),
        centers: Vec::new(),
        widths: Vec::new(),
        norms: Vec::new(),
        snapshots: Vec::new(),
        reference_density: packet.amplitudes()[grid.origin_index()].norm_sqr(),
    };
    let is_snapshot = |t: f64| snaps.contains(&t);
    rec.record(grid, 0.0, packet.amplitudes(), is_snapshot(0.0));

    let mut steps_done = 0usize;
    for (seg_index, seg) in schedule.segments().iter().enumerate() {
        let count = opts.steps_per_segment;
        let mut marks: Vec<f64> = (0..=count)
            .map(|i| seg.tau_start + seg.duration() * i as f64 / count as f64)
            .collect();
        *marks.last_mut().expect("count >= 1") = seg.tau_end;
        marks.extend(
            snaps
                .iter()
                .copied()
                .filter(|&t| t > seg.tau_start && t < seg.tau_end),
        );
        marks.sort_by(f64::total_cmp);
        marks.dedup();

        for (i, w) in marks.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            kernel.step(seg.at(0.5 * (a + b)), b - a, &mut step_phase);
            let max_phase = step_phase.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            if max_phase > PHASE_STEP_LIMIT {
                return Err(Error::PhaseResolution {
                    segment: seg_index,
                    max_phase,
                });
            }
            total_phase
                .iter_mut()
                .zip(&step_phase)
                .for_each(|(t, s)| *t += s);
            steps_done += 1;

            let last_in_segment = i + 2 == marks.len();
            let snap = is_snapshot(b);
            if snap || last_in_segment || steps_done.is_multiple_of(opts.trace_every.max(1)) {
                materialize(grid, &spectrum, &total_phase, &mut buf);
                rec.record(grid, b, &buf, snap);
            }
        }
    }

    materialize(grid, &spectrum, &total_phase, &mut buf);
    let final_state = WavePacket::from_amplitudes(grid.clone(), buf, packet.carrier(), packet.f())?;
    Ok(ProtocolTrace {
        mode: opts.mode,
        times: rec.trace_times,
        centers: rec.centers,
        widths: rec.widths,
        norms: rec.norms,
        snapshots: rec.snapshots,
        final_state,
        storage: storage_diagnostic(schedule, p, packet.f())?,
    })
}

/// Centre drift on one constant-D segment of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlateauVelocity {
    pub tau_start: f64,
    pub tau_end: f64,
    pub d: f64,
    /// Least-squares slope of X̄(τ) over the plateau.
    pub measured: f64,
    /// carrier·m_ph/m₂(D).
    pub expected: f64,
}

pub fn plateau_velocities(
    trace: &ProtocolTrace,
    schedule: &DetuningSchedule,
    p: &CrystalParams,
    carrier: f64,
) -> Vec<PlateauVelocity> {
    schedule
        .segments()
        .iter()
        .filter(|s| s.is_plateau())
        .filter_map(|s| {
            let pts: Vec<(f64, f64)> = trace
                .times
                .iter()
                .zip(&trace.centers)
                .filter(|(t, _)| **t >= s.tau_start && **t <= s.tau_end)
                .map(|(t, c)| (*t, *c))
                .collect();
            let slope = least_squares_slope(&pts)?;
            Some(PlateauVelocity {
                tau_start: s.tau_start,
                tau_end: s.tau_end,
                d: s.d_start,
                measured: slope,
                expected: carrier * p.m_ph() / mass_of_detuning(p, s.d_start),
            })
        })
        .collect()
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// |⟨Ψ_final shifted back to X = 0 | Ψ_initial⟩|² for unit-norm packets on the
/// same grid. The shift is applied in momentum space, so it is sub-cell exact.
pub fn recentered_overlap(initial: &WavePacket, final_state: &WavePacket) -> f64 {
    let grid = initial.grid();
    let shift = final_state.moments().center - initial.moments().center;
    let mut spectrum = final_state.amplitudes().to_vec();
    grid.forward(&mut spectrum);
    for (j, z) in spectrum.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, grid.kappa(j) * shift);
    }
    grid.inverse(&mut spectrum);
    let inner: Complex64 = initial
        .amplitudes()
        .iter()
        .zip(&spectrum)
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        * grid.dx();
    inner.norm_sqr() / (initial.norm() * final_state.norm())
}
