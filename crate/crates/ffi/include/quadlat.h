#ifndef QUADLAT_H
#define QUADLAT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define QL_OK 0

#define QL_ERR_NULL_ARG 1

#define QL_ERR_PARSE 2

#define QL_ERR_DEGENERATE 3

#define QL_ERR_INVALID_INPUT 4

#define QL_ERR_PARAMETER_POLE 5

#define QL_ERR_INTERNAL 6

/**
 * Opaque handle to Bochner data.
 */
typedef struct QlBochner QlBochner;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates Bochner data on the lattice `mu = t^2 + c2 t + c3`.
 *
 * `phi = a0 mu^2 + a1 mu + a2`, `psi = b0 mu + b1`. No admissibility check
 * is done here; solver entry points report `QL_ERR_DEGENERATE`.
 *
 * # Safety
 * All string arguments are valid NUL-terminated strings; `out` is writable.
 */
int32_t ql_bochner_new(const char *c2,
                       const char *c3,
                       const char *a0,
                       const char *a1,
                       const char *a2,
                       const char *b0,
                       const char *b1,
                       struct QlBochner **out);

/**
 * Bochner data of the Racah family with the given parameters.
 *
 * # Safety
 * As for [`ql_bochner_new`].
 */
int32_t ql_bochner_racah(const char *alpha,
                         const char *beta,
                         const char *gamma,
                         const char *delta,
                         struct QlBochner **out);

/**
 * Parses a JSON configuration document holding Bochner data (or a Racah
 * parameter set).
 *
 * # Safety
 * `doc` is a valid NUL-terminated string; `out` is writable.
 */
int32_t ql_bochner_from_json(const char *doc, struct QlBochner **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` is null or a handle not yet freed.
 */
void ql_bochner_free(struct QlBochner *h);

/**
 * `lambda_n` as a `"p/q"` string.
 *
 * # Safety
 * `h` is a live handle; `out` is writable.
 */
int32_t ql_bochner_lambda(const struct QlBochner *h, size_t n, char **out);

/**
 * `{"beta": [...], "gamma": [...], "lambda": [...]}` for `n = 0..=nmax`,
 * with `gamma[0] = "0"`.
 *
 * # Safety
 * `h` is a live handle; `out` is writable.
 */
int32_t ql_bochner_ttrr_json(const struct QlBochner *h, size_t nmax, char **out);

/**
 * `{"n": n, "theta": [...], "mu": [...]}` for the monic solution `P_n`.
 *
 * # Safety
 * `h` is a live handle; `out` is writable.
 */
int32_t ql_bochner_solve_json(const struct QlBochner *h, size_t n, char **out);

/**
 * Runs the selected matrix checks at truncation `size` on the family solved
 * from the data. `checks` is a comma list as accepted by the CLI; null means
 * all. The report array goes to `out_json`; `out_pass` receives 1 when every
 * check passed and 0 otherwise.
 *
 * # Safety
 * `h` is a live handle; `checks` is null or a valid string; out-pointers are
 * writable.
 */
int32_t ql_bochner_verify_json(const struct QlBochner *h,
                               const char *checks,
                               size_t size,
                               char **out_json,
                               int32_t *out_pass);

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library from the same thread.
 */
const char *ql_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` is null or a string from this library not yet freed.
 */
void ql_string_free(char *s);

/**
 * Library version, statically allocated.
 */
const char *ql_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUADLAT_H */
