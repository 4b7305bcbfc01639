/* C API for the charvar engine: exact virtual classes (E-polynomials) of
 * parabolic SL(2,C) representation and character varieties over closed
 * orientable surfaces, plus a finite-field point-counting oracle.
 *
 * Conventions:
 *   - Every function returns an int32_t status code (CHARVAR_OK on
 *     success); results are written through out-pointers.
 *   - Strings returned through out-pointers are NUL-terminated, owned by
 *     the caller, and must be released with charvar_string_free().
 *   - On failure, charvar_last_error_message() returns a thread-local
 *     description valid until the next charvar call on the same thread.
 *
 * Eigenvalue strings use the same syntax as the CLI:
 *   "rat:N/D"        a nonzero rational eigenvalue, e.g. "rat:2/1"
 *   "zeta:ORDER:EXP" a root of unity, e.g. "zeta:4:1" for i
 *   "sym:x1"         a formal (fully generic) eigenvalue; products and
 *                    powers are written like "sym:x1^2*x2", and a leading
 *                    '-' negates, e.g. "sym:-x1"
 */

#ifndef CHARVAR_H
#define CHARVAR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. */
#define CHARVAR_OK 0
#define CHARVAR_ERR_NULL_ARGUMENT 1
#define CHARVAR_ERR_UTF8 2
#define CHARVAR_ERR_PARSE 3
#define CHARVAR_ERR_INVALID_SURFACE 4
#define CHARVAR_ERR_OUT_OF_SCOPE 5
#define CHARVAR_ERR_DATA 6
#define CHARVAR_ERR_COUNT 7
#define CHARVAR_ERR_INTERNAL 8

/* Opaque handle around the fitted operator data. */
typedef struct charvar_data charvar_data;

/* Last error message of the current thread; empty string if none. */
const char *charvar_last_error_message(void);

/* Release a string returned by this library (null is a no-op). */
void charvar_string_free(char *s);

/* Load the fitted operator data from a JSON file, or pass NULL to use the
 * built-in copy. Free the handle with charvar_data_free(). */
int32_t charvar_data_load(const char *path, charvar_data **out);

/* Release a data handle (null is a no-op). */
void charvar_data_free(charvar_data *data);

/* Compute the virtual class of the representation variety for a genus-g
 * surface with jordan_plus / jordan_minus punctures of parabolic type
 * (+1 / -1 eigenvalues), minus_id punctures at -Id, and the given
 * semisimple eigenvalues. Writes the polynomial in q as a text string,
 * e.g. "q^5 + 4q^4 - 4q^2 - q". */
int32_t charvar_compute_rep(const charvar_data *data, uint32_t genus,
                            uint32_t jordan_plus, uint32_t jordan_minus,
                            uint32_t minus_id, const char *const *eigenvalues,
                            size_t n_eigenvalues, char **out_class);

/* Compute the virtual class of the character variety via the closed
 * formulas (no operator data needed). Same surface parameters as
 * charvar_compute_rep(). */
int32_t charvar_compute_char(uint32_t genus, uint32_t jordan_plus,
                             uint32_t jordan_minus, uint32_t minus_id,
                             const char *const *eigenvalues,
                             size_t n_eigenvalues, char **out_class);

/* Count points of the representation variety over the prime field F_p by
 * direct enumeration. Semisimple punctures are given by their trace values
 * mod p. Fails with CHARVAR_ERR_COUNT if the estimated work exceeds
 * work_limit. The count is written as a decimal string. */
int32_t charvar_oracle_count(uint64_t prime, uint32_t genus,
                             uint32_t jordan_plus, uint32_t jordan_minus,
                             uint32_t minus_id, const uint64_t *traces,
                             size_t n_traces, uint64_t work_limit,
                             char **out_count);

#ifdef __cplusplus
}
#endif

#endif /* CHARVAR_H */
