#ifndef FREEQM_H
#define FREEQM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FqmStatus {
  FQM_STATUS_OK = 0,
  FQM_STATUS_VERIFICATION_FAILED = 1,
  FQM_STATUS_INVALID_ARGUMENT = 2,
  FQM_STATUS_PARSE_ERROR = 3,
  FQM_STATUS_CONFIG_ERROR = 4,
  FQM_STATUS_INTERNAL_ERROR = 5,
  FQM_STATUS_NULL_POINTER = 6,
} FqmStatus;

/**
 * Opaque quasimorphism.
 */
typedef struct FqmQuasimorphism FqmQuasimorphism;

/**
 * Opaque decomposition scheme.
 */
typedef struct FqmScheme FqmScheme;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the
 * library; valid until the next call on the same thread.
 */
const char *fqm_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fqm_string_free(char *s);

/**
 * Freely reduces `word`; `*out` receives the reduced word (`"1"` for the identity).
 *
 * # Safety
 * `word` must be a nul-terminated string; `out` must be writable.
 */
enum FqmStatus fqm_word_reduce(uint32_t rank, const char *word, char **out);

/**
 * Creates a scheme from a descriptor such as `brooks:w=ab` or `rolli`.
 *
 * # Safety
 * `descriptor` must be a nul-terminated string; `out` must be writable.
 */
enum FqmStatus fqm_scheme_new(uint32_t rank, const char *descriptor, struct FqmScheme **out);

/**
 * Decomposes `word`; `*out` receives a JSON array of piece strings.
 *
 * # Safety
 * `scheme` must be a live handle; `word` a nul-terminated string; `out` writable.
 */
enum FqmStatus fqm_scheme_decompose(const struct FqmScheme *scheme, const char *word, char **out);

/**
 * # Safety
 * `scheme` must be null or a handle from [`fqm_scheme_new`] not yet freed.
 */
void fqm_scheme_free(struct FqmScheme *scheme);

/**
 * Creates a quasimorphism from a descriptor such as `sms:w=aba`.
 *
 * # Safety
 * `descriptor` must be a nul-terminated string; `out` must be writable.
 */
enum FqmStatus fqm_qm_new(uint32_t rank, const char *descriptor, struct FqmQuasimorphism **out);

/**
 * Evaluates the quasimorphism at `word` as a reduced fraction `num/den`.
 *
 * # Safety
 * `qm` must be a live handle; `word` a nul-terminated string; `num`, `den` writable.
 */
enum FqmStatus fqm_qm_eval(const struct FqmQuasimorphism *qm,
                           const char *word,
                           int64_t *num,
                           int64_t *den);

/**
 * # Safety
 * `qm` must be null or a handle from [`fqm_qm_new`] not yet freed.
 */
void fqm_qm_free(struct FqmQuasimorphism *qm);

/**
 * Builds β for `(qm, omega)` and verifies it on the budget. `*out_json`
 * receives the report. Returns `Ok` if every check passed and
 * `VerificationFailed` otherwise; the report is written in both cases.
 *
 * # Safety
 * `qm` and `omega` must be nul-terminated strings; `out_json` writable.
 */
enum FqmStatus fqm_verify_primitive(uint32_t rank,
                                    const char *qm,
                                    const char *omega,
                                    uint32_t k,
                                    uint32_t budget,
                                    uint64_t seed,
                                    char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREEQM_H */
