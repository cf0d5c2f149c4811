//! C ABI for the `polariton` crate.
//!
//! Every function returns a [`PolcStatus`]; results are written through out
//! pointers. Crystals and packet traces are opaque heap handles released with
//! their `_free` function. On failure a description is available from
//! [`polc_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polariton::bands::{self, Branch};
use polariton::degeneracy;
use polariton::oracle;
use polariton::packet::{
    evolve, gaussian_packet, recentered_overlap, EvolveOptions, Grid, Mode, ProtocolShape,
    ProtocolTrace, WavePacket,
};
use polariton::params::{presets, CrystalParams};
use polariton::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    InvalidArgument = 3,
    NumericalFailure = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolcBranch {
    Upper = 1,
    Lower = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolcMode {
    Parabolic = 0,
    FullBand = 1,
}

/// Opaque crystal parameter set.
pub struct PolcCrystal(CrystalParams);

/// Opaque result of a packet run.
pub struct PolcTrace {
    trace: ProtocolTrace,
    initial: WavePacket,
}

/// One point of a Brillouin-zone scan, SI units.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PolcBandSample {
    pub k: f64,
    pub kl: f64,
    pub omega_ph_k: f64,
    pub omega_at_k: f64,
    pub delta_omega: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub mu1_sq: f64,
    pub mu2_sq: f64,
    pub v1: f64,
    pub v2: f64,
}

/// Write/store/read run settings. Lengths are in units of `f_m`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolcPacketOptions {
    pub grid_n: usize,
    pub length: f64,
    pub carrier: f64,
    pub width: f64,
    pub f_m: f64,
    pub mode: PolcMode,
    pub d_write: f64,
    pub d_store: f64,
    pub ramp_width: f64,
    pub steps_per_segment: usize,
    pub trace_every: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> PolcStatus {
    match err {
        Error::InvalidParams(_) => PolcStatus::InvalidParams,
        e if e.is_numerical() => PolcStatus::NumericalFailure,
        _ => PolcStatus::InvalidArgument,
    }
}

fn fail(status: PolcStatus, msg: impl Into<String>) -> PolcStatus {
    set_error(msg.into());
    status
}

type Outcome = std::result::Result<(), PolcStatus>;

fn guard(body: impl FnOnce() -> Outcome) -> PolcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PolcStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(PolcStatus::Panic, msg)
        }
    }
}

fn lift<T>(r: polariton::Result<T>) -> std::result::Result<T, PolcStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T) -> std::result::Result<&'a T, PolcStatus> {
    p.as_ref()
        .ok_or_else(|| fail(PolcStatus::NullPointer, "null pointer argument"))
}

unsafe fn write<T>(p: *mut T, value: T) -> Outcome {
    if p.is_null() {
        return Err(fail(PolcStatus::NullPointer, "null output pointer"));
    }
    p.write(value);
    Ok(())
}

fn branch(b: PolcBranch) -> Branch {
    match b {
        PolcBranch::Upper => Branch::Upper,
        PolcBranch::Lower => Branch::Lower,
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn polc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates a crystal from hopping rates (rad/s) and lattice constant (m).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polc_crystal_new(
    cells: usize,
    l: f64,
    g: f64,
    alpha: f64,
    beta: f64,
    omega_ph: f64,
    omega_ab: f64,
    out: *mut *mut PolcCrystal,
) -> PolcStatus {
    guard(|| {
        let p = lift(
            CrystalParams {
                cells,
                l,
                g,
                alpha,
                beta,
                omega_ph,
                omega_ab,
            }
            .validate(),
        )?;
        write(out, Box::into_raw(Box::new(PolcCrystal(p))))
    })
}

/// Creates a crystal from effective masses (kg) instead of hopping rates.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polc_crystal_from_masses(
    cells: usize,
    l: f64,
    g: f64,
    m_ph: f64,
    m_at: f64,
    omega_ph: f64,
    omega_ab: f64,
    out: *mut *mut PolcCrystal,
) -> PolcStatus {
    guard(|| {
        let p = lift(CrystalParams::from_masses(
            cells, l, g, m_ph, m_at, omega_ph, omega_ab,
        ))?;
        write(out, Box::into_raw(Box::new(PolcCrystal(p))))
    })
}

/// Loads a bundled preset: "fig2" or "reduced" (".json" optional).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polc_crystal_preset(
    name: *const c_char,
    out: *mut *mut PolcCrystal,
) -> PolcStatus {
    guard(|| {
        if name.is_null() {
            return Err(fail(PolcStatus::NullPointer, "null preset name"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| fail(PolcStatus::InvalidArgument, "preset name is not UTF-8"))?;
        let text = presets::lookup(name).ok_or_else(|| {
            fail(
                PolcStatus::InvalidArgument,
                format!("unknown preset '{name}'"),
            )
        })?;
        let file = lift(polariton::params::ParamsFile::from_json(text))?;
        let p = lift(file.resolve())?;
        write(out, Box::into_raw(Box::new(PolcCrystal(p))))
    })
}

/// # Safety
/// `crystal` must be null or a handle from a `polc_crystal_*` constructor
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn polc_crystal_free(crystal: *mut PolcCrystal) {
    if !crystal.is_null() {
        drop(Box::from_raw(crystal));
    }
}

/// Upper (`m1`) and lower (`m2`) polariton masses at the band bottom, kg.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_polariton_masses(
    crystal: *const PolcCrystal,
    m1: *mut f64,
    m2: *mut f64,
) -> PolcStatus {
    guard(|| {
        let p = &deref(crystal)?.0;
        let (a, b) = bands::polariton_masses(p);
        write(m1, a)?;
        write(m2, b)
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_effective_detuning(
    crystal: *const PolcCrystal,
    out: *mut f64,
) -> PolcStatus {
    guard(|| write(out, deref(crystal)?.0.effective_detuning()))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_delta_omega(
    crystal: *const PolcCrystal,
    k: f64,
    out: *mut f64,
) -> PolcStatus {
    guard(|| write(out, bands::delta_omega(&deref(crystal)?.0, k)))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_branch_frequencies(
    crystal: *const PolcCrystal,
    k: f64,
    omega_1: *mut f64,
    omega_2: *mut f64,
) -> PolcStatus {
    guard(|| {
        let (a, b) = bands::branch_frequencies(&deref(crystal)?.0, k);
        write(omega_1, a)?;
        write(omega_2, b)
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_hopfield_fractions(
    crystal: *const PolcCrystal,
    k: f64,
    mu1_sq: *mut f64,
    mu2_sq: *mut f64,
) -> PolcStatus {
    guard(|| {
        let (a, b) = bands::hopfield_fractions(&deref(crystal)?.0, k);
        write(mu1_sq, a)?;
        write(mu2_sq, b)
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_group_velocity(
    crystal: *const PolcCrystal,
    k: f64,
    which: PolcBranch,
    out: *mut f64,
) -> PolcStatus {
    guard(|| {
        write(
            out,
            bands::group_velocity(&deref(crystal)?.0, k, branch(which)),
        )
    })
}

/// Fills `buf[0..n_points]` with a symmetric scan over kl ∈ [−π, π].
///
/// # Safety
/// `buf` must be valid for `capacity` samples.
#[no_mangle]
pub unsafe extern "C" fn polc_band_scan(
    crystal: *const PolcCrystal,
    n_points: usize,
    buf: *mut PolcBandSample,
    capacity: usize,
) -> PolcStatus {
    guard(|| {
        let p = &deref(crystal)?.0;
        if buf.is_null() {
            return Err(fail(PolcStatus::NullPointer, "null sample buffer"));
        }
        if capacity < n_points {
            return Err(fail(
                PolcStatus::InvalidArgument,
                format!("buffer holds {capacity} samples, {n_points} requested"),
            ));
        }
        let scan = lift(bands::band_scan(p, n_points))?;
        for (i, s) in scan.iter().enumerate() {
            buf.add(i).write(PolcBandSample {
                k: s.k,
                kl: s.kl,
                omega_ph_k: s.omega_ph_k,
                omega_at_k: s.omega_at_k,
                delta_omega: s.delta_omega,
                omega_1: s.omega_1,
                omega_2: s.omega_2,
                mu1_sq: s.mu1_sq,
                mu2_sq: s.mu2_sq,
                v1: s.v1,
                v2: s.v2,
            });
        }
        Ok(())
    })
}

/// Diagonalises the 2M×2M tight-binding matrix and reports the largest
/// deviation from the analytic ring spectrum.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_oracle_max_rel_dev(
    crystal: *const PolcCrystal,
    out: *mut f64,
) -> PolcStatus {
    guard(|| {
        let cmp = lift(oracle::compare_to_analytic(&deref(crystal)?.0))?;
        write(out, cmp.max_rel_dev)
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polc_degeneracy_temperature(
    n1: f64,
    m2: f64,
    out: *mut f64,
) -> PolcStatus {
    guard(|| write(out, lift(degeneracy::degeneracy_temperature(n1, m2))?))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polc_thermal_wavelength(m2: f64, t: f64, out: *mut f64) -> PolcStatus {
    guard(|| write(out, lift(degeneracy::thermal_wavelength(m2, t))?))
}

/// Defaults matching the `polc packet` command.
#[no_mangle]
pub extern "C" fn polc_packet_options_default() -> PolcPacketOptions {
    let shape = ProtocolShape::default();
    PolcPacketOptions {
        grid_n: 2048,
        length: 64.0,
        carrier: 10.0,
        width: 1.0,
        f_m: 1e-4,
        mode: PolcMode::Parabolic,
        d_write: shape.d_write,
        d_store: shape.d_store,
        ramp_width: shape.ramp_width,
        steps_per_segment: 2000,
        trace_every: 10,
    }
}

/// Runs the write/store/read protocol.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_packet_run(
    crystal: *const PolcCrystal,
    options: *const PolcPacketOptions,
    out: *mut *mut PolcTrace,
) -> PolcStatus {
    guard(|| {
        let p = &deref(crystal)?.0;
        let o = *deref(options)?;
        let grid = lift(Grid::new(o.grid_n, o.length))?;
        let initial = lift(gaussian_packet(&grid, o.carrier, o.width, o.f_m))?;
        let schedule = lift(
            ProtocolShape {
                d_write: o.d_write,
                d_store: o.d_store,
                ramp_width: o.ramp_width,
                ..ProtocolShape::default()
            }
            .schedule(),
        )?;
        let opts = EvolveOptions {
            mode: match o.mode {
                PolcMode::Parabolic => Mode::Parabolic,
                PolcMode::FullBand => Mode::FullBand,
            },
            steps_per_segment: o.steps_per_segment,
            trace_every: o.trace_every,
            snapshot_times: Vec::new(),
        };
        let trace = lift(evolve(&initial, &schedule, p, &opts))?;
        write(out, Box::into_raw(Box::new(PolcTrace { trace, initial })))
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_trace_len(trace: *const PolcTrace, out: *mut usize) -> PolcStatus {
    guard(|| write(out, deref(trace)?.trace.len()))
}

/// Trace point `index`: τ, centre X̄, width σ and norm.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_trace_get(
    trace: *const PolcTrace,
    index: usize,
    tau: *mut f64,
    center: *mut f64,
    width: *mut f64,
    norm: *mut f64,
) -> PolcStatus {
    guard(|| {
        let t = &deref(trace)?.trace;
        if index >= t.len() {
            return Err(fail(
                PolcStatus::InvalidArgument,
                format!("index {index} out of range for {} points", t.len()),
            ));
        }
        write(tau, t.times[index])?;
        write(center, t.centers[index])?;
        write(width, t.widths[index])?;
        write(norm, t.norms[index])
    })
}

/// Overlap of the final state, shifted back to the start, with the initial
/// packet.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_trace_overlap(trace: *const PolcTrace, out: *mut f64) -> PolcStatus {
    guard(|| {
        let t = deref(trace)?;
        write(out, recentered_overlap(&t.initial, &t.trace.final_state))
    })
}

/// Ratio t_stor/τ_b of the run's storage stage.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn polc_trace_storage_ratio(
    trace: *const PolcTrace,
    out: *mut f64,
) -> PolcStatus {
    guard(|| write(out, deref(trace)?.trace.storage.ratio))
}

/// # Safety
/// `trace` must be null or a handle from [`polc_packet_run`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn polc_trace_free(trace: *mut PolcTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}
