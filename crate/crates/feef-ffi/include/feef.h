/* C interface to the feef library. Generated; do not edit. */

#ifndef FEEF_H
#define FEEF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every ABI call.
typedef enum FeefStatus {
  // Success; output pointers are filled.
  FEEF_STATUS_OK = 0,
  // A required pointer argument was null.
  FEEF_STATUS_NULL_ARGUMENT = 1,
  // Arguments were structurally invalid (unknown name, wrong length,
  // malformed config, bad UTF-8). Details via `feef_last_error`.
  FEEF_STATUS_INVALID_ARGUMENT = 2,
  // The operation itself failed. Details via `feef_last_error`.
  FEEF_STATUS_RUNTIME_FAILURE = 3,
} FeefStatus;

// Opaque environment handle.
typedef struct FeefEnv FeefEnv;

// Fixed-size environment description.
typedef struct FeefEnvSpec {
  size_t state_dim;
  size_t action_dim;
  size_t max_steps;
  // True per-step maximum reward (centers the preferred prior).
  double r_max;
} FeefEnvSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `cap` bytes) and return the full message length in bytes,
// excluding the NUL. `buf` may be null to query the length alone.
//
// # Safety
// `buf` must point to `cap` writable bytes when non-null.
size_t feef_last_error(char *buf, size_t cap);

// Library version as a static NUL-terminated string.
const char *feef_version(void);

// Create an environment by registry name ("mountain_car", "pendulum",
// "point_maze"). On success `*out` owns the handle; release it with
// [`feef_env_free`].
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum FeefStatus feef_env_new(const char *name, struct FeefEnv **out);

// Release an environment handle. Null is a no-op; freeing the same handle
// twice is undefined behaviour, as in C.
//
// # Safety
// `env` must be null or a handle returned by [`feef_env_new`].
void feef_env_free(struct FeefEnv *env);

// Fill `*out` with the environment's dimensions and reward ceiling.
//
// # Safety
// `env` must be a live handle and `out` a valid pointer.
enum FeefStatus feef_env_spec(const struct FeefEnv *env, struct FeefEnvSpec *out);

// Per-dimension action bounds.
//
// # Safety
// `env` must be a live handle; `low` and `high` must be valid pointers.
enum FeefStatus feef_env_action_bounds(const struct FeefEnv *env,
                                       size_t dim,
                                       double *low,
                                       double *high);

// Write the seeded initial state into `state` (`state_len` must equal
// `state_dim`).
//
// # Safety
// `env` must be a live handle; `state` must point to `state_len` doubles.
enum FeefStatus feef_env_reset(const struct FeefEnv *env,
                               uint64_t seed,
                               double *state,
                               size_t state_len);

// Advance one step: reads (`state`, `action`), writes the successor state,
// reward, and terminal-success flag. Actions outside bounds are clamped.
//
// # Safety
// `env` must be a live handle; all buffers must match the declared
// lengths, and `reward`/`done` must be valid pointers.
enum FeefStatus feef_env_step(const struct FeefEnv *env,
                              const double *state,
                              size_t state_len,
                              const double *action,
                              size_t action_len,
                              double *next_state,
                              double *reward,
                              bool *done);

// Run a full experiment from config text in the key=value format used by
// config files; metrics land in the config's `out_dir`.
//
// # Safety
// `config_text` must be a NUL-terminated string.
enum FeefStatus feef_run_experiment(const char *config_text);

// Evaluate the exact-enumeration bound and decomposition on `toys` seeded
// random tabular worlds; `*all_hold` reports whether every case passed.
//
// # Safety
// `all_hold` must be a valid pointer.
enum FeefStatus feef_bound_check(size_t toys, uint64_t seed, bool *all_hold);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FEEF_H */
