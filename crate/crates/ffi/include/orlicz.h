#ifndef ORLICZ_H
#define ORLICZ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OrliczRangeClass {
  ORLICZ_RANGE_CLASS_FINITE_RANK = 0,
  ORLICZ_RANGE_CLASS_NOT_CLOSED_RANGE = 1,
  ORLICZ_RANGE_CLASS_INCONCLUSIVE = 2,
} OrliczRangeClass;

typedef enum OrliczStatus {
  ORLICZ_STATUS_OK = 0,
  ORLICZ_STATUS_NULL_POINTER = 1,
  ORLICZ_STATUS_INVALID_ARGUMENT = 2,
  ORLICZ_STATUS_INVALID_UTF8 = 3,
  ORLICZ_STATUS_CONFIG = 4,
  ORLICZ_STATUS_NUMERICAL = 5,
  ORLICZ_STATUS_REFUSED = 6,
  ORLICZ_STATUS_PANIC = 7,
} OrliczStatus;

typedef enum OrliczVerdict {
  ORLICZ_VERDICT_CERTIFIED = 0,
  ORLICZ_VERDICT_REFUTED = 1,
  ORLICZ_VERDICT_INCONCLUSIVE = 2,
} OrliczVerdict;

/**
 * Opaque measure space.
 */
typedef struct OrliczSpace OrliczSpace;

/**
 * Opaque Young function.
 */
typedef struct OrliczYoung OrliczYoung;

/**
 * Numerical settings. `orlicz_settings_default` fills the library defaults.
 */
typedef struct OrliczSettings {
  /**
   * Generated atoms realized from a family.
   */
  size_t budget_n;
  /**
   * Partial sums above this count as divergent.
   */
  double threshold;
  double tol;
} OrliczSettings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or NULL. The pointer is
 * valid until the next failing call.
 */
const char *orlicz_last_error(void);

struct OrliczSettings orlicz_settings_default(void);

/**
 * `x^p / p`, `p > 1`.
 */
enum OrliczStatus orlicz_young_power(double p, struct OrliczYoung **out_handle);

/**
 * `exp(x^p) - x^p - 1`, `p >= 1`.
 */
enum OrliczStatus orlicz_young_exp_power(double p, struct OrliczYoung **out_handle);

/**
 * `(1 + x^p) ln(1 + x^p) - x^p`, `p >= 1`.
 */
enum OrliczStatus orlicz_young_l_log_l(double p, struct OrliczYoung **out_handle);

/**
 * Complementary function of `phi` as a new handle.
 *
 * # Safety
 * `phi` must be a live handle or NULL.
 */
enum OrliczStatus orlicz_young_complementary(const struct OrliczYoung *phi,
                                             struct OrliczYoung **out_handle);

/**
 * # Safety
 * `phi` must come from an `orlicz_young_*` constructor and not be used afterwards.
 */
void orlicz_young_free(struct OrliczYoung *phi);

/**
 * # Safety
 * `phi` must be a live handle or NULL.
 */
enum OrliczStatus orlicz_young_evaluate(const struct OrliczYoung *phi, double x, double *out_value);

/**
 * `sup_x (xy - Φ(x))` for `y >= 0`.
 *
 * # Safety
 * `phi` must be a live handle or NULL.
 */
enum OrliczStatus orlicz_young_conjugate(const struct OrliczYoung *phi,
                                         double y,
                                         double tol,
                                         double *out_value);

/**
 * Purely atomic space with the given positive masses.
 *
 * # Safety
 * `masses` must point to `n` doubles.
 */
enum OrliczStatus orlicz_space_atomic(const double *masses,
                                      size_t n,
                                      struct OrliczSpace **out_handle);

/**
 * # Safety
 * `space` must come from `orlicz_space_atomic` and not be used afterwards.
 */
void orlicz_space_free(struct OrliczSpace *space);

/**
 * Number of atoms of `space`.
 *
 * # Safety
 * `space` must be a live handle or NULL.
 */
enum OrliczStatus orlicz_space_atoms(const struct OrliczSpace *space, size_t *out_count);

/**
 * Luxemburg norm of the function with atom values `values`.
 *
 * # Safety
 * Handles must be live or NULL; `values` must point to `n` doubles.
 */
enum OrliczStatus orlicz_luxemburg_norm(const struct OrliczSpace *space,
                                        const double *values,
                                        size_t n,
                                        const struct OrliczYoung *phi,
                                        double tol,
                                        double *out_norm);

/**
 * Boundedness of `M_u : L^{Φ₁} → L^{Φ₂}`. `phi3` may be NULL. `out_bound`
 * receives the certified operator-norm bound or NaN.
 *
 * # Safety
 * Handles must be live or NULL (`phi3`, `settings` optional); `u` must point to `n` doubles.
 */
enum OrliczStatus orlicz_check_mult(const struct OrliczSpace *space,
                                    const double *u,
                                    size_t n,
                                    const struct OrliczYoung *phi1,
                                    const struct OrliczYoung *phi2,
                                    const struct OrliczYoung *phi3,
                                    const struct OrliczSettings *settings,
                                    enum OrliczVerdict *out_verdict,
                                    double *out_bound);

/**
 * Boundedness of `C_T` for the atom map `map` (atom `i` goes to `map[i]`).
 *
 * # Safety
 * As for `orlicz_check_mult`; `map` must point to `n` indices.
 */
enum OrliczStatus orlicz_check_comp(const struct OrliczSpace *space,
                                    const size_t *map,
                                    size_t n,
                                    const struct OrliczYoung *phi1,
                                    const struct OrliczYoung *phi2,
                                    const struct OrliczYoung *phi3,
                                    const struct OrliczSettings *settings,
                                    enum OrliczVerdict *out_verdict,
                                    double *out_bound);

/**
 * Range class of `M_u`. `out_rank` is set for finite rank, else 0.
 *
 * # Safety
 * As for `orlicz_check_mult`.
 */
enum OrliczStatus orlicz_classify_mult(const struct OrliczSpace *space,
                                       const double *u,
                                       size_t n,
                                       const struct OrliczYoung *phi1,
                                       const struct OrliczYoung *phi2,
                                       const struct OrliczYoung *phi3,
                                       const struct OrliczSettings *settings,
                                       enum OrliczRangeClass *out_class,
                                       size_t *out_rank);

/**
 * Range class of `C_T`.
 *
 * # Safety
 * As for `orlicz_check_comp`.
 */
enum OrliczStatus orlicz_classify_comp(const struct OrliczSpace *space,
                                       const size_t *map,
                                       size_t n,
                                       const struct OrliczYoung *phi1,
                                       const struct OrliczYoung *phi2,
                                       const struct OrliczYoung *phi3,
                                       const struct OrliczSettings *settings,
                                       enum OrliczRangeClass *out_class,
                                       size_t *out_rank);

/**
 * Runs every request of a TOML analysis config and returns the report as
 * JSON (`machine != 0`) or text. Free the result with `orlicz_string_free`.
 *
 * # Safety
 * `config` must be a NUL-terminated string or NULL.
 */
enum OrliczStatus orlicz_run_config(const char *config, int32_t machine, char **out_report);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void orlicz_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORLICZ_H */
