/* C interface to the collatz-slots library. */

#ifndef COLLATZ_SLOTS_H
#define COLLATZ_SLOTS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible function.
typedef enum CzStatus {
  CZ_STATUS_OK = 0,
  // A required pointer argument was NULL.
  CZ_STATUS_NULL_POINTER = 1,
  // An argument failed to parse or violated a documented precondition.
  CZ_STATUS_INVALID_INPUT = 2,
  // The orbit did not reach 1 within the step cap.
  CZ_STATUS_CAP_EXCEEDED = 3,
  // An index was past the end of the collection.
  CZ_STATUS_OUT_OF_RANGE = 4,
  // An unexpected internal failure; the out-pointers are untouched.
  CZ_STATUS_INTERNAL = 5,
} CzStatus;

// Steadiness variant selector.
typedef enum CzSigmaMode {
  // Product over orbit-set elements congruent to 4 mod 6.
  CZ_SIGMA_MODE_LITERAL = 0,
  // Product over images of odd steps only.
  CZ_SIGMA_MODE_TELESCOPING = 1,
} CzSigmaMode;

// Opaque handle to a level set.
typedef struct CzLevelSet CzLevelSet;

// Opaque handle to a computed orbit.
typedef struct CzOrbit CzOrbit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; do not free.
const char *cz_version(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be NULL or a pointer previously returned through an
// out-parameter of this library, not yet freed.
void cz_string_free(char *s);

// Computes the orbit of `n` (decimal string, >= 1) down to 1, stopping
// with `CZ_STATUS_CAP_EXCEEDED` after `cap` steps.
//
// # Safety
// `n` must be a valid NUL-terminated string and `out` a valid pointer.
enum CzStatus cz_orbit_compute(const char *n, uint64_t cap, struct CzOrbit **out);

// # Safety
// `orbit` must be a live handle from `cz_orbit_compute`; `out` valid.
enum CzStatus cz_orbit_nu(const struct CzOrbit *orbit, uint64_t *out);

// # Safety
// `orbit` must be a live handle from `cz_orbit_compute`; `out` valid.
enum CzStatus cz_orbit_kappa(const struct CzOrbit *orbit, uint64_t *out);

// Exact steadiness of the orbit in the chosen variant, returned as two
// decimal strings (numerator, denominator) of the reduced fraction.
//
// # Safety
// `orbit` must be a live handle; `out_num` and `out_den` valid pointers.
enum CzStatus cz_orbit_sigma(const struct CzOrbit *orbit,
                             enum CzSigmaMode mode,
                             char **out_num,
                             char **out_den);

// Writes 1 to `out` when `n = (2^nu / 6^kappa) * sigma` holds exactly
// for the chosen variant, 0 otherwise. The telescoping variant always
// holds; the literal variant need not.
//
// # Safety
// `orbit` must be a live handle; `out` a valid pointer.
enum CzStatus cz_orbit_identity_holds(const struct CzOrbit *orbit,
                                      enum CzSigmaMode mode,
                                      uint8_t *out);

// # Safety
// `orbit` must be NULL or a live handle, not yet freed.
void cz_orbit_free(struct CzOrbit *orbit);

// Generates the level set L_nu.
//
// # Safety
// `out` must be a valid pointer.
enum CzStatus cz_levelset_compute(uint32_t nu, struct CzLevelSet **out);

// # Safety
// `levelset` must be a live handle; `out` a valid pointer.
enum CzStatus cz_levelset_nu(const struct CzLevelSet *levelset, uint32_t *out);

// # Safety
// `levelset` must be a live handle; `out` a valid pointer.
enum CzStatus cz_levelset_len(const struct CzLevelSet *levelset, size_t *out);

// Element at `index` (ascending order) as a decimal string.
//
// # Safety
// `levelset` must be a live handle; `out` a valid pointer.
enum CzStatus cz_levelset_element(const struct CzLevelSet *levelset, size_t index, char **out);

// # Safety
// `levelset` must be NULL or a live handle, not yet freed.
void cz_levelset_free(struct CzLevelSet *levelset);

// Running-minimum steadiness scan over the integers in [lo, hi].
// Writes the reduced minimum as decimal numerator/denominator strings
// and its smallest attaining argument.
//
// # Safety
// The three out-pointers must be valid.
enum CzStatus cz_scan_min(uint64_t lo,
                          uint64_t hi,
                          enum CzSigmaMode mode,
                          uint64_t cap,
                          char **out_num,
                          char **out_den,
                          char **out_argmin);

// Slot bounds [sigma0 * 2^nu / 6^kappa, 2^nu / 6^kappa] for the exact
// `sigma0` given as "<num>/<den>". Both bounds come back in the same
// "<num>/<den>" form.
//
// # Safety
// `sigma0` must be a valid NUL-terminated string; the out-pointers valid.
enum CzStatus cz_slot_bounds(uint32_t nu,
                             uint32_t kappa,
                             const char *sigma0,
                             char **out_lower,
                             char **out_upper);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COLLATZ_SLOTS_H */
