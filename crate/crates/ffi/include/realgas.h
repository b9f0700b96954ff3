#ifndef REALGAS_H
#define REALGAS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum RgStatus {
  RG_STATUS_OK = 0,
  RG_STATUS_NULL_POINTER = 1,
  RG_STATUS_DOMAIN = 2,
  RG_STATUS_BRACKET = 3,
  RG_STATUS_CONVERGENCE = 4,
  RG_STATUS_QUADRATURE = 5,
  RG_STATUS_RANGE = 6,
  RG_STATUS_NO_COEXISTENCE = 7,
  RG_STATUS_EXTRAPOLATION = 8,
  RG_STATUS_NON_INVERTIBLE = 9,
  RG_STATUS_MULTIVALUED = 10,
  RG_STATUS_OUT_OF_BRANCH = 11,
  RG_STATUS_SINGULARITY = 12,
  RG_STATUS_SOLVER = 13,
  RG_STATUS_CONFIG = 14,
  RG_STATUS_IO = 15,
  RG_STATUS_PANIC = 16,
} RgStatus;

/**
 * Opaque coexistence curve.
 */
typedef struct RgCurve RgCurve;

/**
 * Opaque filtration field.
 */
typedef struct RgField RgField;

/**
 * Opaque gas model.
 */
typedef struct RgGas RgGas;

/**
 * Opaque tabulated isentrope.
 */
typedef struct RgIsentrope RgIsentrope;

typedef struct RgState {
  double v;
  double t;
  double p;
  double e;
  double sigma;
  double gamma;
} RgState;

typedef struct RgCriticalPoint {
  double v_c;
  double t_c;
  double p_c;
} RgCriticalPoint;

typedef struct RgCoexistencePoint {
  double t;
  double p_sat;
  double v_liquid;
  double v_gas;
} RgCoexistencePoint;

typedef struct RgFieldSummary {
  size_t nodes;
  size_t valid;
  size_t near_source;
  size_t out_of_range;
  /**
   * Node counts by phase code: liquid, gas, condensation, supercritical,
   * inapplicable.
   */
  size_t phases[5];
} RgFieldSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread (empty if none). The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *rg_last_error_message(void);

/**
 * Static name of a status code.
 */
const char *rg_status_name(enum RgStatus status);

/**
 * Creates a gas with `n` degrees of freedom and physical constants `a`,
 * `b`, `r` (used only for unit conversion).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum RgStatus rg_gas_new(double n, double a, double b, double r, struct RgGas **out);

/**
 * # Safety
 * `gas` must be null or a handle from `rg_gas_new` not yet freed.
 */
void rg_gas_free(struct RgGas *gas);

/**
 * Reduced state at `(v, t)`.
 *
 * # Safety
 * `gas` must be a live handle and `out` valid for writing.
 */
enum RgStatus rg_gas_state(const struct RgGas *gas, double v, double t, struct RgState *out);

/**
 * # Safety
 * `gas` must be a live handle and `out` valid for writing.
 */
enum RgStatus rg_gas_critical_point(const struct RgGas *gas, struct RgCriticalPoint *out);

/**
 * Spinodal temperature at volume `v`.
 *
 * # Safety
 * `gas` must be a live handle and `out` valid for writing.
 */
enum RgStatus rg_gas_spinodal_t(const struct RgGas *gas, double v, double *out);

/**
 * Limit of `H(v)`: the entropy level above which `Q` is invertible.
 *
 * # Safety
 * `gas` must be a live handle and `out` valid for writing.
 */
enum RgStatus rg_sigma_star(const struct RgGas *gas, double *out);

/**
 * Traces the coexistence curve on `[t_min, t_max]` (`t_max >= T_c` adds
 * the critical endpoint).
 *
 * # Safety
 * `gas` must be a live handle and `out` valid for writing.
 */
enum RgStatus rg_curve_trace(const struct RgGas *gas,
                             double t_min,
                             double t_max,
                             size_t steps,
                             struct RgCurve **out);

/**
 * # Safety
 * `curve` must be null or a handle from `rg_curve_trace` not yet freed.
 */
void rg_curve_free(struct RgCurve *curve);

/**
 * Number of points on the curve (0 for a null handle).
 *
 * # Safety
 * `curve` must be null or a live handle.
 */
size_t rg_curve_len(const struct RgCurve *curve);

/**
 * Point `index`, in order of increasing temperature.
 *
 * # Safety
 * `curve` must be a live handle and `out` valid for writing.
 */
enum RgStatus rg_curve_point(const struct RgCurve *curve,
                             size_t index,
                             struct RgCoexistencePoint *out);

/**
 * Phase code of `(v, t)`: 0 liquid, 1 gas, 2 condensation, 3
 * supercritical, 4 inapplicable.
 *
 * # Safety
 * `curve` and `gas` must be live handles and `out` valid for writing.
 */
enum RgStatus rg_curve_classify(const struct RgCurve *curve,
                                const struct RgGas *gas,
                                double v,
                                double t,
                                int32_t *out);

/**
 * Tabulates the isentrope `sigma0` for a medium with permeability `k` and
 * viscosity `mu`, with default tabulation options.
 *
 * # Safety
 * `gas` must be a live handle and `out` valid for writing.
 */
enum RgStatus rg_isentrope_build(const struct RgGas *gas,
                                 double sigma0,
                                 double k,
                                 double mu,
                                 struct RgIsentrope **out);

/**
 * # Safety
 * `iso` must be null or a handle from `rg_isentrope_build` not yet freed.
 */
void rg_isentrope_free(struct RgIsentrope *iso);

/**
 * 1 if `Q` is monotone on this isentrope, 0 otherwise or for a null handle.
 *
 * # Safety
 * `iso` must be null or a live handle.
 */
int32_t rg_isentrope_invertible(const struct RgIsentrope *iso);

/**
 * Temperature at volume `v`.
 *
 * # Safety
 * `iso` must be a live handle and `out` valid for writing.
 */
enum RgStatus rg_isentrope_temperature(const struct RgIsentrope *iso, double v, double *out);

/**
 * Filtration potential `Q(v)`, normalised to vanish as `v -> inf`.
 *
 * # Safety
 * `iso` must be a live handle and `out` valid for writing.
 */
enum RgStatus rg_isentrope_q(const struct RgIsentrope *iso, double v, double *out);

/**
 * Volume `v` with `Q(v) = q`.
 *
 * # Safety
 * `iso` must be a live handle and `out` valid for writing.
 */
enum RgStatus rg_isentrope_invert_q(const struct RgIsentrope *iso, double q, double *out);

/**
 * Runs a filtration scenario given as TOML text (the CLI scenario format).
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` valid for writing.
 */
enum RgStatus rg_field_from_scenario(const char *toml, struct RgField **out);

/**
 * # Safety
 * `field` must be null or a handle from `rg_field_from_scenario` not yet
 * freed.
 */
void rg_field_free(struct RgField *field);

/**
 * Node counts of a field.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writing.
 */
enum RgStatus rg_field_summary(const struct RgField *field, struct RgFieldSummary *out);

/**
 * Copies the per-node volumes (NaN on masked nodes) into `buf`, which must
 * hold `len` values; `len` must equal the node count. Nodes run with `x1`
 * fastest, then `x2`, then `x3`.
 *
 * # Safety
 * `field` must be a live handle and `buf` valid for `len` writes.
 */
enum RgStatus rg_field_volumes(const struct RgField *field, double *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REALGAS_H */
