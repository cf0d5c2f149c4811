#ifndef POLARITON_H
#define POLARITON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PolcBranch {
  POLC_BRANCH_UPPER = 1,
  POLC_BRANCH_LOWER = 2,
} PolcBranch;

typedef enum PolcMode {
  POLC_MODE_PARABOLIC = 0,
  POLC_MODE_FULL_BAND = 1,
} PolcMode;

typedef enum PolcStatus {
  POLC_STATUS_OK = 0,
  POLC_STATUS_NULL_POINTER = 1,
  POLC_STATUS_INVALID_PARAMS = 2,
  POLC_STATUS_INVALID_ARGUMENT = 3,
  POLC_STATUS_NUMERICAL_FAILURE = 4,
  POLC_STATUS_PANIC = 5,
} PolcStatus;

// Opaque crystal parameter set.
typedef struct PolcCrystal PolcCrystal;

// Opaque result of a packet run.
typedef struct PolcTrace PolcTrace;

// One point of a Brillouin-zone scan, SI units.
typedef struct PolcBandSample {
  double k;
  double kl;
  double omega_ph_k;
  double omega_at_k;
  double delta_omega;
  double omega_1;
  double omega_2;
  double mu1_sq;
  double mu2_sq;
  double v1;
  double v2;
} PolcBandSample;

// Write/store/read run settings. Lengths are in units of `f_m`.
typedef struct PolcPacketOptions {
  size_t grid_n;
  double length;
  double carrier;
  double width;
  double f_m;
  enum PolcMode mode;
  double d_write;
  double d_store;
  double ramp_width;
  size_t steps_per_segment;
  size_t trace_every;
} PolcPacketOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length in bytes.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t polc_last_error(char *buf, size_t len);

// Creates a crystal from hopping rates (rad/s) and lattice constant (m).
//
// # Safety
// `out` must be a valid pointer.
enum PolcStatus polc_crystal_new(size_t cells,
                                 double l,
                                 double g,
                                 double alpha,
                                 double beta,
                                 double omega_ph,
                                 double omega_ab,
                                 struct PolcCrystal **out);

// Creates a crystal from effective masses (kg) instead of hopping rates.
//
// # Safety
// `out` must be a valid pointer.
enum PolcStatus polc_crystal_from_masses(size_t cells,
                                         double l,
                                         double g,
                                         double m_ph,
                                         double m_at,
                                         double omega_ph,
                                         double omega_ab,
                                         struct PolcCrystal **out);

// Loads a bundled preset: "fig2" or "reduced" (".json" optional).
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum PolcStatus polc_crystal_preset(const char *name, struct PolcCrystal **out);

// # Safety
// `crystal` must be null or a handle from a `polc_crystal_*` constructor
// that has not been freed.
void polc_crystal_free(struct PolcCrystal *crystal);

// Upper (`m1`) and lower (`m2`) polariton masses at the band bottom, kg.
//
// # Safety
// Pointers must be valid.
enum PolcStatus polc_polariton_masses(const struct PolcCrystal *crystal, double *m1, double *m2);

// # Safety
// Pointers must be valid.
enum PolcStatus polc_effective_detuning(const struct PolcCrystal *crystal, double *out);

// # Safety
// Pointers must be valid.
enum PolcStatus polc_delta_omega(const struct PolcCrystal *crystal, double k, double *out);

// # Safety
// Pointers must be valid.
enum PolcStatus polc_branch_frequencies(const struct PolcCrystal *crystal,
                                        double k,
                                        double *omega_1,
                                        double *omega_2);

// # Safety
// Pointers must be valid.
enum PolcStatus polc_hopfield_fractions(const struct PolcCrystal *crystal,
                                        double k,
                                        double *mu1_sq,
                                        double *mu2_sq);

// # Safety
// Pointers must be valid.
enum PolcStatus polc_group_velocity(const struct PolcCrystal *crystal,
                                    double k,
                                    enum PolcBranch which,
                                    double *out);

// Fills `buf[0..n_points]` with a symmetric scan over kl ∈ [−π, π].
//
// # Safety
// `buf` must be valid for `capacity` samples.
enum PolcStatus polc_band_scan(const struct PolcCrystal *crystal,
                               size_t n_points,
                               struct PolcBandSample *buf,
                               size_t capacity);

// Diagonalises the 2M×2M tight-binding matrix and reports the largest
// deviation from the analytic ring spectrum.
//
// # Safety
// Pointers must be valid.
enum PolcStatus polc_oracle_max_rel_dev(const struct PolcCrystal *crystal, double *out);

// # Safety
// `out` must be a valid pointer.
enum PolcStatus polc_degeneracy_temperature(double n1, double m2, double *out);

// # Safety
// `out` must be a valid pointer.
enum PolcStatus polc_thermal_wavelength(double m2, double t, double *out);

// Defaults matching the `polc packet` command.
struct PolcPacketOptions polc_packet_options_default(void);

// Runs the write/store/read protocol.
//
// # Safety
// Pointers must be valid.
enum PolcStatus polc_packet_run(const struct PolcCrystal *crystal,
                                const struct PolcPacketOptions *options,
                                struct PolcTrace **out);

// # Safety
// Pointers must be valid.
enum PolcStatus polc_trace_len(const struct PolcTrace *trace, size_t *out);

// Trace point `index`: τ, centre X̄, width σ and norm.
//
// # Safety
// Pointers must be valid.
enum PolcStatus polc_trace_get(const struct PolcTrace *trace,
                               size_t index,
                               double *tau,
                               double *center,
                               double *width,
                               double *norm);

// Overlap of the final state, shifted back to the start, with the initial
// packet.
//
// # Safety
// Pointers must be valid.
enum PolcStatus polc_trace_overlap(const struct PolcTrace *trace, double *out);

// Ratio t_stor/τ_b of the run's storage stage.
//
// # Safety
// Pointers must be valid.
enum PolcStatus polc_trace_storage_ratio(const struct PolcTrace *trace, double *out);

// # Safety
// `trace` must be null or a handle from [`polc_packet_run`] that has not
// been freed.
void polc_trace_free(struct PolcTrace *trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLARITON_H */
