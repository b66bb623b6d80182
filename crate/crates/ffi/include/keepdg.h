#ifndef KEEPDG_H
#define KEEPDG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Discrete-gradient operator selector.
typedef enum KeepdgDg {
  KEEPDG_DG_SIADG = 0,
  KEEPDG_DG_GDG = 1,
  KEEPDG_DG_MVDG = 2,
} KeepdgDg;

// Result code of every call.
typedef enum KeepdgStatus {
  KEEPDG_STATUS_OK = 0,
  KEEPDG_STATUS_NULL_POINTER = 1,
  KEEPDG_STATUS_INVALID_ARGUMENT = 2,
  KEEPDG_STATUS_EOS = 3,
  KEEPDG_STATUS_FLUX = 4,
  KEEPDG_STATUS_SOLVER = 5,
  KEEPDG_STATUS_PANIC = 6,
} KeepdgStatus;

// Opaque equation of state.
typedef struct KeepdgEos KeepdgEos;

// Opaque running simulation.
typedef struct KeepdgSimulation KeepdgSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *keepdg_last_error_message(void);

// Creates a CO2 equation of state: `"ig"`, `"vdw"` or `"pr"`.
//
// # Safety
// `name` must be a valid C string and `out` a valid pointer.
enum KeepdgStatus keepdg_eos_new(const char *name, struct KeepdgEos **out);

// # Safety
// `eos` must come from [`keepdg_eos_new`] or be null.
void keepdg_eos_free(struct KeepdgEos *eos);

// Pressure at `(rho, T)`, Pa.
//
// # Safety
// `eos` and `out` must be valid pointers.
enum KeepdgStatus keepdg_eos_pressure(const struct KeepdgEos *eos,
                                      double rho,
                                      double temperature,
                                      double *out);

// Specific internal energy at `(rho, T)`, J/kg.
//
// # Safety
// `eos` and `out` must be valid pointers.
enum KeepdgStatus keepdg_eos_internal_energy(const struct KeepdgEos *eos,
                                             double rho,
                                             double temperature,
                                             double *out);

// Speed of sound at `(rho, T)`, m/s.
//
// # Safety
// `eos` and `out` must be valid pointers.
enum KeepdgStatus keepdg_eos_sound_speed(const struct KeepdgEos *eos,
                                         double rho,
                                         double temperature,
                                         double *out);

// Temperature with `e(rho, T) = e`.
//
// # Safety
// `eos` and `out` must be valid pointers.
enum KeepdgStatus keepdg_eos_temperature(const struct KeepdgEos *eos,
                                         double rho,
                                         double e,
                                         double *out);

// KEEP-DG flux between two three-dimensional conserved states
// `[rho, m1, m2, m3, E]` along `axis` (0, 1 or 2).
//
// # Safety
// `left`, `right` and `out` must each point to 5 doubles.
enum KeepdgStatus keepdg_flux(const struct KeepdgEos *eos,
                              enum KeepdgDg dg,
                              const double *left,
                              const double *right,
                              size_t axis,
                              double *out);

// Sets up a built-in case (`"density_wave"`, `"tgv_inviscid"`,
// `"tgv_viscous"`, `"tgv_ig_validation"`) on `cells` cells per axis with
// its default CFL and final time. `threads = 0` picks the default count.
//
// # Safety
// `name` must be a valid C string and `out` a valid pointer.
enum KeepdgStatus keepdg_simulation_new(const char *name,
                                        size_t cells,
                                        size_t threads,
                                        struct KeepdgSimulation **out);

// # Safety
// `sim` must come from [`keepdg_simulation_new`] or be null.
void keepdg_simulation_free(struct KeepdgSimulation *sim);

// Advances by up to `steps` time steps, stopping at the final time.
//
// # Safety
// `sim` must be a valid handle.
enum KeepdgStatus keepdg_simulation_step(struct KeepdgSimulation *sim, size_t steps);

// Current time in seconds, or NaN for a null handle.
//
// # Safety
// `sim` must be a valid handle or null.
double keepdg_simulation_time(const struct KeepdgSimulation *sim);

// Number of doubles in the conserved state, `(d + 2) * cells`; 0 for null.
//
// # Safety
// `sim` must be a valid handle or null.
size_t keepdg_simulation_state_len(const struct KeepdgSimulation *sim);

// Copies the conserved state, cell by cell with the first axis fastest,
// into `buf` of `len` doubles.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum KeepdgStatus keepdg_simulation_copy_state(const struct KeepdgSimulation *sim,
                                               double *buf,
                                               size_t len);

// Total entropy `S_h` and kinetic energy `K_h` of the current state.
//
// # Safety
// `sim`, `entropy` and `kinetic_energy` must be valid pointers.
enum KeepdgStatus keepdg_simulation_integrals(struct KeepdgSimulation *sim,
                                              double *entropy,
                                              double *kinetic_energy);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KEEPDG_H */
