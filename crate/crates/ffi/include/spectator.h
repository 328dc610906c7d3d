#ifndef SPECTATOR_H
#define SPECTATOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpectatorStatus {
  SPECTATOR_STATUS_OK = 0,
  SPECTATOR_STATUS_NULL_POINTER = 1,
  SPECTATOR_STATUS_INVALID_UTF8 = 2,
  SPECTATOR_STATUS_SCENARIO = 3,
  SPECTATOR_STATUS_NUMERIC = 4,
  SPECTATOR_STATUS_INVALID_ARGUMENT = 5,
  SPECTATOR_STATUS_NOT_FOUND = 6,
  SPECTATOR_STATUS_PANIC = 7,
} SpectatorStatus;

/**
 * Pipeline report. Opaque to C.
 */
typedef struct SpectatorReport SpectatorReport;

/**
 * Loaded scenario. Opaque to C.
 */
typedef struct SpectatorScenario SpectatorScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string. Do not free.
 */
const char *spectator_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Free with
 * [`spectator_string_free`].
 */
char *spectator_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void spectator_string_free(char *s);

/**
 * Loads a built-in fixture by name or a scenario file by path.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum SpectatorStatus spectator_scenario_load(const char *spec, struct SpectatorScenario **out);

/**
 * Parses a scenario from TOML text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum SpectatorStatus spectator_scenario_from_toml(const char *text, struct SpectatorScenario **out);

/**
 * # Safety
 * `sc` must be NULL or a handle from a scenario constructor, not yet freed.
 */
void spectator_scenario_free(struct SpectatorScenario *sc);

/**
 * Runs the pipeline. `numeric` enables the numeric cross-checks; `grid` of 0
 * keeps the scenario's grid.
 *
 * # Safety
 * `sc` must be a live scenario handle; `out` must be writable.
 */
enum SpectatorStatus spectator_scenario_run(const struct SpectatorScenario *sc,
                                            bool numeric,
                                            size_t n_max,
                                            size_t grid,
                                            struct SpectatorReport **out);

/**
 * # Safety
 * `r` must be NULL or a handle from [`spectator_scenario_run`], not yet freed.
 */
void spectator_report_free(struct SpectatorReport *r);

/**
 * JSON form of the report. Free with [`spectator_string_free`].
 *
 * # Safety
 * `r` must be a live report handle.
 */
char *spectator_report_json(const struct SpectatorReport *r);

/**
 * Human-readable report text. Free with [`spectator_string_free`].
 *
 * # Safety
 * `r` must be a live report handle.
 */
char *spectator_report_text(const struct SpectatorReport *r);

/**
 * Text of one named quantity, e.g. `"angular_momentum.zero_point"`.
 *
 * # Safety
 * `r` must be a live report handle, `name` a NUL-terminated string and
 * `out` writable.
 */
enum SpectatorStatus spectator_report_quantity(const struct SpectatorReport *r,
                                               const char *name,
                                               char **out);

/**
 * Number of golden checks and how many passed.
 *
 * # Safety
 * `r` must be a live report handle; `total` and `passed` writable or NULL.
 */
enum SpectatorStatus spectator_report_goldens(const struct SpectatorReport *r,
                                              size_t *total,
                                              size_t *passed);

/**
 * Lowest `k` radial levels of sector `m` (units hbar = mu = q = c = 1) on an
 * automatic grid of `n_points`, written to `levels[0..k]`.
 *
 * # Safety
 * `levels` must point to `k` writable doubles.
 */
enum SpectatorStatus spectator_radial_spectrum(double alpha,
                                               double omega_c,
                                               double omega_p,
                                               int64_t m,
                                               size_t n_points,
                                               size_t k,
                                               double tolerance,
                                               double *levels);

/**
 * Closed-form levels for the same sector, written to `levels[0..k]`.
 *
 * # Safety
 * `levels` must point to `k` writable doubles.
 */
enum SpectatorStatus spectator_fock_darwin(double alpha,
                                           double omega_c,
                                           double omega_p,
                                           int64_t m,
                                           size_t k,
                                           double *levels);

/**
 * Secular frequency of the radial Paul motion with default integration
 * settings. `effective` receives `Omega^2/(4 drive)` when not NULL.
 *
 * # Safety
 * `frequency` must be writable; `effective` writable or NULL.
 */
enum SpectatorStatus spectator_secular_frequency(double v_amp,
                                                 double d,
                                                 double drive,
                                                 double mu,
                                                 double charge,
                                                 double duration,
                                                 double *frequency,
                                                 double *effective);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECTATOR_H */
