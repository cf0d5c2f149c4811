use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const JOIN_TOLERANCE: f64 = 1e-12;

/// Linear piece of D(τ) between `tau_start` and `tau_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub tau_start: f64,
    pub tau_end: f64,
    pub d_start: f64,
    pub d_end: f64,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.tau_end - self.tau_start
    }

    pub fn is_plateau(&self) -> bool {
        self.d_start == self.d_end
    }

    pub fn at(&self, tau: f64) -> f64 {
        let span = self.duration();
        let s = ((tau - self.tau_start) / span).clamp(0.0, 1.0);
        self.d_start + s * (self.d_end - self.d_start)
    }
}

/// Piecewise-linear normalised detuning D(τ) = Δ̃/(2|g|) on [0, τ_final].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetuningSchedule {
    segments: Vec<Segment>,
}

impl<'de> Deserialize<'de> for DetuningSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            segments: Vec<Segment>,
        }
        let raw = Raw::deserialize(d)?;
        DetuningSchedule::new(raw.segments).map_err(serde::de::Error::custom)
    }
}

impl DetuningSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::Schedule("no segments".into()))?;
        if first.tau_start != 0.0 {
            return Err(Error::Schedule(format!(
                "schedule starts at tau = {}, expected 0",
                first.tau_start
            )));
        }
        for (i, s) in segments.iter().enumerate() {
            let finite = [s.tau_start, s.tau_end, s.d_start, s.d_end]
                .iter()
                .all(|x| x.is_finite());
            if !finite || s.tau_end <= s.tau_start {
                return Err(Error::Schedule(format!(
                    "segment {i} is empty or malformed: {s:?}"
                )));
            }
        }
        for (i, w) in segments.windows(2).enumerate() {
            if (w[1].tau_start - w[0].tau_end).abs() > JOIN_TOLERANCE {
                return Err(Error::Schedule(format!(
                    "gap or overlap between segments {i} and {}: {} vs {}",
                    i + 1,
                    w[0].tau_end,
                    w[1].tau_start
                )));
            }
            if (w[1].d_start - w[0].d_end).abs() > JOIN_TOLERANCE * w[0].d_end.abs().max(1.0) {
                return Err(Error::Schedule(format!(
                    "D jumps from {} to {} at tau = {}",
                    w[0].d_end, w[1].d_start, w[0].tau_end
                )));
            }
        }
        Ok(Self { segments })
    }

    /// D held at `d` on [0, `tau_final`].
    pub fn constant(d: f64, tau_final: f64) -> Result<Self> {
        Self::new(vec![Segment {
            tau_start: 0.0,
            tau_end: tau_final,
            d_start: d,
            d_end: d,
        }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn tau_final(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.tau_end)
    }

    /// D(τ), or `None` outside [0, τ_final].
    pub fn evaluate(&self, tau: f64) -> Option<f64> {
        if !(0.0..=self.tau_final()).contains(&tau) {
            return None;
        }
        self.segments
            .iter()
            .find(|s| tau <= s.tau_end)
            .map(|s| s.at(tau))
    }

    /// Total τ spent with D < 0, counting ramps by their linear crossing.
    pub fn time_below_zero(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| match (s.d_start < 0.0, s.d_end < 0.0) {
                (true, true) => s.duration(),
                (false, false) => 0.0,
                _ => {
                    let cross = s.d_start / (s.d_start - s.d_end);
                    let frac = if s.d_start < 0.0 { cross } else { 1.0 - cross };
                    frac * s.duration()
                }
            })
            .sum()
    }
}

/// Shape of the write/store/read sequence. Ramps end at `store_start` and
/// start at `read_start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolShape {
    pub d_write: f64,
    pub d_store: f64,
    pub ramp_width: f64,
    pub store_start: f64,
    pub read_start: f64,
    pub tau_final: f64,
}

impl Default for ProtocolShape {
    fn default() -> Self {
        Self {
            d_write: 5.0,
            d_store: -5.0,
            ramp_width: 0.05,
            store_start: 0.25,
            read_start: 0.75,
            tau_final: 1.0,
        }
    }
}

impl ProtocolShape {
    pub fn schedule(&self) -> Result<DetuningSchedule> {
        let ramp_in = self.store_start - self.ramp_width;
        let ramp_out = self.read_start + self.ramp_width;
        let plateau = |a, b, d| Segment {
            tau_start: a,
            tau_end: b,
            d_start: d,
            d_end: d,
        };
        let ramp = |a, b, d0, d1| Segment {
            tau_start: a,
            tau_end: b,
            d_start: d0,
            d_end: d1,
        };
        DetuningSchedule::new(vec![
            plateau(0.0, ramp_in, self.d_write),
            ramp(ramp_in, self.store_start, self.d_write, self.d_store),
            plateau(self.store_start, self.read_start, self.d_store),
            ramp(self.read_start, ramp_out, self.d_store, self.d_write),
            plateau(ramp_out, self.tau_final, self.d_write),
        ])
    }
}

/// D = +5 until τ = 0.20, ramp to −5 by 0.25, hold until 0.75, ramp back to
/// +5 by 0.80 and hold until τ = 1.
pub fn default_protocol() -> DetuningSchedule {
    ProtocolShape::default()
        .schedule()
        .expect("default protocol is well formed")
}
