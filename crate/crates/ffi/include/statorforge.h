#ifndef STATORFORGE_H
#define STATORFORGE_H

/* Generated by cbindgen from the statorforge-ffi sources. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_INVALID_ARGUMENT = 2,
  SF_STATUS_NOT_SQUARE = 3,
  SF_STATUS_NOT_NORMAL = 4,
  SF_STATUS_NOT_HERMITIAN = 5,
  SF_STATUS_NOT_UNITARY = 6,
  SF_STATUS_NOT_ISOMETRY = 7,
  SF_STATUS_DIMENSION_MISMATCH = 8,
  SF_STATUS_NON_FINITE = 9,
  SF_STATUS_INVALID_TABLE = 10,
  SF_STATUS_UNKNOWN_BUILTIN = 11,
  SF_STATUS_INCOMPLETE_IRREPS = 12,
  SF_STATUS_UNKNOWN_IRREP = 13,
  SF_STATUS_INDEX_OUT_OF_RANGE = 14,
  SF_STATUS_INCOMPLETE_KRAUS = 15,
  SF_STATUS_NOT_UNITARY_CHOICE = 16,
  SF_STATUS_NOT_UNITARY_ELEMENT = 17,
  SF_STATUS_NOT_NORMALIZED = 18,
  SF_STATUS_ZERO_KRAUS = 19,
  SF_STATUS_NOT_PROPORTIONAL_TO_UNITARY = 20,
  SF_STATUS_MISMATCHED_ANCILLA = 21,
  SF_STATUS_TOO_LARGE = 22,
  SF_STATUS_PARSE = 23,
  SF_STATUS_IO = 24,
  SF_STATUS_PANIC = 25,
} SfStatus;

/**
 * A finite group with its irreps.
 */
typedef struct SfGroup SfGroup;

/**
 * A dense complex matrix.
 */
typedef struct SfMatrix SfMatrix;

/**
 * A stator (Kraus operators with ancilla labels).
 */
typedef struct SfStator SfStator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the message of the last failed call on this thread, or NULL.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *sf_last_error_message(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sf_string_free(char *s);

/**
 * Creates a `rows × cols` matrix from row-major arrays of length
 * `rows·cols`. `im` may be NULL for a real matrix.
 *
 * # Safety
 * `re` (and `im` if non-NULL) must point to `rows·cols` doubles.
 */
enum SfStatus sf_matrix_new(size_t rows,
                            size_t cols,
                            const double *re,
                            const double *im,
                            struct SfMatrix **out);

/**
 * Parses a matrix from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string.
 */
enum SfStatus sf_matrix_from_json(const char *json, struct SfMatrix **out);

/**
 * Serializes a matrix to JSON. Free the result with `sf_string_free`.
 *
 * # Safety
 * `m` must be a live handle.
 */
enum SfStatus sf_matrix_to_json(const struct SfMatrix *m, char **out);

/**
 * # Safety
 * `m` must be NULL or a live handle, not used afterwards.
 */
void sf_matrix_free(struct SfMatrix *m);

/**
 * Number of rows, or 0 for NULL.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
size_t sf_matrix_rows(const struct SfMatrix *m);

/**
 * Number of columns, or 0 for NULL.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
size_t sf_matrix_cols(const struct SfMatrix *m);

/**
 * Copies the entries row-major into `re` and `im`, each of length `len`,
 * which must equal `rows·cols`.
 *
 * # Safety
 * `re` and `im` must be writable for `len` doubles.
 */
enum SfStatus sf_matrix_copy(const struct SfMatrix *m, double *re, double *im, size_t len);

/**
 * Builds a stator for a normal `theta_a`. `w` and `kappa` may be NULL for
 * identity choices. Writes the stator and `Θ_B`.
 *
 * # Safety
 * Handles must be live; output pointers must be writable.
 */
enum SfStatus sf_stator_construct(const struct SfMatrix *theta_a,
                                  const struct SfMatrix *w,
                                  const struct SfMatrix *kappa,
                                  struct SfStator **out_stator,
                                  struct SfMatrix **out_theta_b);

/**
 * Parses a stator from JSON, checking completeness.
 *
 * # Safety
 * `json` must be a NUL-terminated string.
 */
enum SfStatus sf_stator_from_json(const char *json, struct SfStator **out);

/**
 * Serializes a stator to JSON. Free the result with `sf_string_free`.
 *
 * # Safety
 * `s` must be a live handle.
 */
enum SfStatus sf_stator_to_json(const struct SfStator *s, char **out);

/**
 * # Safety
 * `s` must be NULL or a live handle, not used afterwards.
 */
void sf_stator_free(struct SfStator *s);

/**
 * `N_A`, or 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t sf_stator_dim_a(const struct SfStator *s);

/**
 * `N_B`, or 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t sf_stator_dim_b(const struct SfStator *s);

/**
 * A copy of Kraus operator `index`.
 *
 * # Safety
 * `s` must be a live handle.
 */
enum SfStatus sf_stator_kraus(const struct SfStator *s, size_t index, struct SfMatrix **out);

/**
 * `‖Σ M†M − 1‖_F`.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum SfStatus sf_stator_completeness_residual(const struct SfStator *s, double *out);

/**
 * `max_i ‖Σ_j (Θ_B)_ij M_j − M_i Θ_A‖_F`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum SfStatus sf_stator_eigenop_residual(const struct SfStator *s,
                                         const struct SfMatrix *theta_a,
                                         const struct SfMatrix *theta_b,
                                         double *out);

/**
 * Rebases the ancilla by the unitary `c`; the new labels are `0..N_B`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum SfStatus sf_stator_rebase(const struct SfStator *s,
                               const struct SfMatrix *c,
                               struct SfStator **out);

/**
 * The unitary dilation `U_AB` with `U|ψ>|zero_index> = S|ψ>`.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum SfStatus sf_stator_dilate(const struct SfStator *s, size_t zero_index, struct SfMatrix **out);

/**
 * A built-in group by name (`Z3`, `D4`, `S3`, `Q8`, …).
 *
 * # Safety
 * `name` must be a NUL-terminated string.
 */
enum SfStatus sf_group_builtin(const char *name, struct SfGroup **out);

/**
 * # Safety
 * `g` must be NULL or a live handle, not used afterwards.
 */
void sf_group_free(struct SfGroup *g);

/**
 * `|G|`, or 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live handle.
 */
size_t sf_group_order(const struct SfGroup *g);

/**
 * The unitary Fourier matrix `F[g, (j,m,n)] = sqrt(d_j/|G|) D^j_mn(g)`.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum SfStatus sf_group_fourier_matrix(const struct SfGroup *g, struct SfMatrix **out);

/**
 * The stator `Σ_g |g><g| ⊗ |g>`.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum SfStatus sf_group_element_stator(const struct SfGroup *g, struct SfStator **out);

/**
 * `<0_B| U† e^{−i H_B t} U |ψ>|0_B>` for a state given as arrays of length
 * `len`. Writes the output state into `out_re`/`out_im` (length `len`) and
 * the leaked weight into `out_leak`.
 *
 * # Safety
 * Handles must be live; arrays must hold `len` doubles (`psi_im` may be
 * NULL for a real state).
 */
enum SfStatus sf_effective_evolve(const struct SfMatrix *u_ab,
                                  const struct SfMatrix *h_b,
                                  double t,
                                  const double *psi_re,
                                  const double *psi_im,
                                  size_t len,
                                  double *out_re,
                                  double *out_im,
                                  double *out_leak);

/**
 * Runs the `K`-site `σ_z^{⊗K}` demo and reports its worst deviation from
 * direct evolution, the worst leak, and whether the deviation is within
 * `tol`.
 *
 * # Safety
 * Output pointers must be writable.
 */
enum SfStatus sf_plaquette_demo(size_t k_sites,
                                double coupling,
                                double t,
                                double tol,
                                double *out_deviation,
                                double *out_leak,
                                bool *out_pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STATORFORGE_H */
