#ifndef KOOPMAN_LAB_H
#define KOOPMAN_LAB_H

/* Generated by cbindgen from koopman-lab-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Classification returned by `kl_surface_membership`.
 */
typedef enum KlPieceKind {
  KL_PIECE_KIND_NOT_ON_SURFACE = 0,
  KL_PIECE_KIND_PLANE = 1,
  KL_PIECE_KIND_BRIDGE = 2,
} KlPieceKind;

/**
 * Status code returned by every fallible entry point.
 */
typedef enum KlStatus {
  KL_STATUS_OK = 0,
  KL_STATUS_NULL_POINTER = 1,
  KL_STATUS_INVALID_ARGUMENT = 2,
  KL_STATUS_RANGE_ERROR = 3,
  KL_STATUS_NUMERICAL_FAILURE = 4,
} KlStatus;

/**
 * Opaque sparse-polynomial handle.
 */
typedef struct KlPoly KlPoly;

/**
 * Opaque surface handle.
 */
typedef struct KlSurface KlSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *kl_version(void);

/**
 * Builds the surface with `l` isolated equilibria and snake amplitude `a`.
 *
 * # Safety
 * `out` must be a valid pointer; on `Ok` it receives a handle that must be
 * released with `kl_surface_free`.
 */
enum KlStatus kl_surface_build(uint32_t l, double a, struct KlSurface **out);

/**
 * # Safety
 * `s` must be a handle from `kl_surface_build`, not yet freed; null is a
 * no-op.
 */
void kl_surface_free(struct KlSurface *s);

/**
 * # Safety
 * `s` and `out` must be valid pointers.
 */
enum KlStatus kl_surface_equilibrium_count(const struct KlSurface *s, size_t *out);

/**
 * Writes the equilibria as consecutive (x, y, z) triples.
 *
 * # Safety
 * `out` must have room for `capacity` doubles; `written` receives the
 * number of doubles stored.
 */
enum KlStatus kl_surface_equilibria(const struct KlSurface *s,
                                    double *out,
                                    size_t capacity,
                                    size_t *written);

/**
 * Classifies an ambient point against the surface.
 *
 * # Safety
 * All pointers must be valid; `out_index` receives the plane height k or
 * the bridge number j when the point is on the surface.
 */
enum KlStatus kl_surface_membership(const struct KlSurface *s,
                                    double x,
                                    double y,
                                    double z,
                                    double tol,
                                    enum KlPieceKind *out_kind,
                                    uint32_t *out_index);

/**
 * The snake displacement g(z) and its derivative.
 *
 * # Safety
 * `s`, `out_g` and `out_g_prime` must be valid pointers.
 */
enum KlStatus kl_surface_snake(const struct KlSurface *s,
                               double z,
                               double *out_g,
                               double *out_g_prime);

/**
 * Closed-form flow of the 3-D system: out = exp(A t) applied to xyz.
 *
 * # Safety
 * `xyz` and `out` must point to at least 3 doubles each.
 */
enum KlStatus kl_closed_form_flow3(double t, const double *xyz, double *out);

/**
 * The section coordinate q(x, y, z) = y.
 *
 * # Safety
 * `out` receives a handle that must be released with `kl_poly_free`.
 */
enum KlStatus kl_poly_taming_q(struct KlPoly **out);

/**
 * The weighted-height polynomial (1 + y^2)^(l-1) M z + x Pi(z).
 *
 * # Safety
 * As for `kl_poly_taming_q`.
 */
enum KlStatus kl_poly_taming_p(uint32_t l, double m_const, struct KlPoly **out);

/**
 * The hand-picked degree-3 polynomial (z - 1/2)(x + (1 + y^2)).
 *
 * # Safety
 * As for `kl_poly_taming_q`.
 */
enum KlStatus kl_poly_example2_p(struct KlPoly **out);

/**
 * The turn-level product Pi(z).
 *
 * # Safety
 * As for `kl_poly_taming_q`.
 */
enum KlStatus kl_poly_turn_product(uint32_t l, struct KlPoly **out);

/**
 * # Safety
 * `p` must be a handle from one of the polynomial constructors; null is a
 * no-op.
 */
void kl_poly_free(struct KlPoly *p);

/**
 * Evaluates the polynomial at a point of length `len`.
 *
 * # Safety
 * `point` must hold `len` doubles; `out` must be valid.
 */
enum KlStatus kl_poly_eval(const struct KlPoly *p, const double *point, size_t len, double *out);

/**
 * Total degree of the polynomial.
 *
 * # Safety
 * `p` and `out` must be valid pointers.
 */
enum KlStatus kl_poly_degree(const struct KlPoly *p, uint32_t *out);

/**
 * Serializes the polynomial to its JSON form (graded-lex term order).
 * Returns null on failure; release with `kl_string_free`.
 *
 * # Safety
 * `p` must be a live polynomial handle.
 */
char *kl_poly_to_json(const struct KlPoly *p);

/**
 * # Safety
 * `s` must come from `kl_poly_to_json` and not be freed twice.
 */
void kl_string_free(char *s);

/**
 * (1 + margin) times the maximum of |x Pi'(z)| over the box.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum KlStatus kl_compute_m(uint32_t l,
                           double x_lo,
                           double x_hi,
                           double z_lo,
                           double z_hi,
                           double margin,
                           double *out);

/**
 * Dimension of the degree-m polynomial space on n variables.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum KlStatus kl_basis_dim(uint32_t n, uint32_t m, uint64_t *out);

/**
 * Necessary degree condition for taming a snake with the given turns;
 * `infinite` overrides `turns`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum KlStatus kl_obstruction_check(uint64_t turns, bool infinite, uint64_t degree, bool *out);

/**
 * Runs the monotone-and-onto taming sweep of `p` (with q = y) over the
 * given section heights.  `out_pass` receives the verdict, `out_margin`
 * the worst derivative margin measured along the traversals.
 *
 * # Safety
 * `s` and `p` must be live handles; `y_grid` must hold `y_len` doubles;
 * `out_pass` and `out_margin` must be valid.
 */
enum KlStatus kl_verify_taming(const struct KlSurface *s,
                               const struct KlPoly *p,
                               const double *y_grid,
                               size_t y_len,
                               double margin,
                               bool *out_pass,
                               double *out_margin);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KOOPMAN_LAB_H */
