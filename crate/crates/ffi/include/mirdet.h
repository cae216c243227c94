#ifndef MIRDET_H
#define MIRDET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result of every fallible call. Values 2–4 match the exit codes of the
// `mirdet` command-line tool.
typedef enum MirdetStatus {
  MIRDET_STATUS_OK = 0,
  // Null pointer or non-UTF-8 string argument.
  MIRDET_STATUS_INVALID_ARGUMENT = 1,
  MIRDET_STATUS_CONFIG = 2,
  MIRDET_STATUS_DOMAIN = 3,
  MIRDET_STATUS_IO = 4,
  // A Rust panic was caught at the boundary.
  MIRDET_STATUS_INTERNAL = 5,
} MirdetStatus;

// Opaque scenario handle.
typedef struct MirdetScenario MirdetScenario;

// Opaque handle for one simulated run and its start–stop histogram.
typedef struct MirdetSimulation MirdetSimulation;

// Modeled figures of merit of a scenario.
typedef struct MirdetEvaluation {
  double focusing_factor;
  double eta_sfg;
  // Non-zero when the conversion formula exceeded 1 and was clamped.
  int32_t eta_sfg_clamped;
  double eta_tot;
  double dark_rate_hz;
  double background_rate_hz;
  double total_rate_hz;
  // W; infinite when `eta_tot` is zero.
  double snr0_w;
  // W
  double floor_w;
} MirdetEvaluation;

typedef struct MirdetRunSummary {
  uint64_t seed;
  double duration_s;
  uint64_t pulses;
  uint64_t generated_photons;
  uint64_t signal_events;
  uint64_t dark_events;
  uint64_t background_events;
  uint64_t dead_time_losses;
  uint64_t recorded_events;
  double recorded_rate_hz;
  double expected_rate_hz;
  uint64_t histogram_total;
  uint64_t histogram_overflow;
  uint64_t histogram_unpaired;
} MirdetRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string. The
// pointer stays valid until the next `mirdet_*` call on the same thread.
const char *mirdet_last_error(void);

// Library version as a static NUL-terminated string.
const char *mirdet_version(void);

// Boyd–Kleinman focusing factor `h(ξ)`.
//
// # Safety
// `out_h` must be null or valid for writes.
enum MirdetStatus mirdet_boyd_kleinman_h(double xi, double *out_h);

// Optimal focusing parameter and the corresponding focusing factor.
//
// # Safety
// Both pointers must be null or valid for writes.
enum MirdetStatus mirdet_optimal_focusing(double *out_xi, double *out_h);

// Sum-frequency conversion efficiency, clamped to 1. `out_clamped`
// may be null.
//
// # Safety
// `out_eta` must be valid for writes; `out_clamped` null or valid.
enum MirdetStatus mirdet_sfg_efficiency(double crystal_length_m,
                                        double d_eff_m_per_v,
                                        double attenuation_per_m,
                                        double n_sfg,
                                        double pump_wavelength_m,
                                        double pump_power_w,
                                        double signal_wavelength_m,
                                        double focusing_factor,
                                        double *out_eta,
                                        int32_t *out_clamped);

// Thermal background count rate for a rectangular filter band.
//
// # Safety
// `out_rate_hz` must be null or valid for writes.
enum MirdetStatus mirdet_background_rate(double eta_tot,
                                         double center_frequency_hz,
                                         double bandwidth_hz,
                                         double temperature_k,
                                         double emissivity,
                                         double *out_rate_hz);

// Optical power at unit signal-to-noise ratio, W.
//
// # Safety
// `out_w` must be null or valid for writes.
enum MirdetStatus mirdet_snr0(double signal_wavelength_m,
                              double eta_tot,
                              double dark_rate_hz,
                              double background_rate_hz,
                              double *out_w);

// Background-limited SNR₀ floor for a rectangular filter band, W.
//
// # Safety
// `out_w` must be null or valid for writes.
enum MirdetStatus mirdet_sensitivity_floor(double signal_wavelength_m,
                                           double bandwidth_hz,
                                           double temperature_k,
                                           double emissivity,
                                           double *out_w);

// Loads and validates a scenario TOML file. `strict` non-zero rejects
// unknown keys.
//
// # Safety
// `path` must be null or a NUL-terminated string; `out_scenario` must be
// null or valid for writes.
enum MirdetStatus mirdet_scenario_load(const char *path,
                                       int32_t strict,
                                       struct MirdetScenario **out_scenario);

// One of the scenarios shipped with the library (`paper_25C`, `paper_93C`).
//
// # Safety
// `name` must be null or a NUL-terminated string; `out_scenario` must be
// null or valid for writes.
enum MirdetStatus mirdet_scenario_bundled(const char *name, struct MirdetScenario **out_scenario);

// Releases a scenario. Null is ignored.
//
// # Safety
// `scenario` must be null or a handle from this library not yet freed.
void mirdet_scenario_free(struct MirdetScenario *scenario);

// Evaluates the modeled efficiency chain, noise and sensitivity.
//
// # Safety
// `scenario` must be null or a live handle; `out_eval` null or valid.
enum MirdetStatus mirdet_scenario_evaluate(const struct MirdetScenario *scenario,
                                           struct MirdetEvaluation *out_eval);

// Simulates the scenario's counting experiment and builds its histogram.
// `duration_s <= 0` uses the scenario duration.
//
// # Safety
// `scenario` must be null or a live handle; `out_sim` null or valid.
enum MirdetStatus mirdet_simulate(const struct MirdetScenario *scenario,
                                  uint64_t seed,
                                  double duration_s,
                                  struct MirdetSimulation **out_sim);

// Releases a simulation. Null is ignored.
//
// # Safety
// `sim` must be null or a handle from this library not yet freed.
void mirdet_simulation_free(struct MirdetSimulation *sim);

// # Safety
// `sim` must be null or a live handle; `out_summary` null or valid.
enum MirdetStatus mirdet_simulation_summary(const struct MirdetSimulation *sim,
                                            struct MirdetRunSummary *out_summary);

// Number of histogram bins, or 0 for a null handle.
//
// # Safety
// `sim` must be null or a live handle.
size_t mirdet_simulation_bin_count(const struct MirdetSimulation *sim);

// Copies the histogram into caller buffers: `bin_count + 1` edges (s) and
// `bin_count` counts. Either buffer may be null to skip it.
//
// # Safety
// Non-null buffers must hold at least the stated number of elements.
enum MirdetStatus mirdet_simulation_histogram(const struct MirdetSimulation *sim,
                                              double *edges_s,
                                              uint64_t *counts,
                                              size_t bin_count);

// Writes the histogram as `bin_start_ns,bin_end_ns,counts` CSV.
//
// # Safety
// `sim` must be null or a live handle; `path` null or NUL-terminated.
enum MirdetStatus mirdet_simulation_write_csv(const struct MirdetSimulation *sim, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIRDET_H */
