#ifndef WEIL_H
#define WEIL_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum WeilStatus {
  WEIL_STATUS_OK = 0,
  /*
   A null pointer or a string that is not UTF-8.
   */
  WEIL_STATUS_INVALID_ARGUMENT = 1,
  /*
   Malformed manifest, expression or algebra specification.
   */
  WEIL_STATUS_INVALID_INPUT = 2,
  /*
   The request is well formed but cannot be carried out, e.g. a parity
   mismatch between structure and algebra.
   */
  WEIL_STATUS_UNSUPPORTED = 3,
  /*
   A bug inside the library; the message carries the panic payload.
   */
  WEIL_STATUS_INTERNAL = 4,
} WeilStatus;

typedef enum WeilFormat {
  WEIL_FORMAT_TEXT = 0,
  WEIL_FORMAT_JSON = 1,
  WEIL_FORMAT_LATEX = 2,
} WeilFormat;

/*
 A parsed Weil algebra.
 */
typedef struct WeilAlgebraHandle WeilAlgebraHandle;

/*
 A parsed structure manifest.
 */
typedef struct WeilManifest WeilManifest;

/*
 The outcome of a verify, lift, compare or demo run.
 */
typedef struct WeilReport WeilReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failing call on this thread, or the empty string.
 Valid until the next call into the library from the same thread.
 */
const char *weil_last_error(void);

/*
 # Safety
 `s` must be null or a string returned by this library.
 */
void weil_string_free(char *s);

/*
 Parses `dual`, `trivial`, `jet(k)` or `truncated(n,k)`.

 # Safety
 `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum WeilStatus weil_algebra_parse(const char *spec, struct WeilAlgebraHandle **out);

/*
 # Safety
 `a` must be null or a handle from [`weil_algebra_parse`], freed once.
 */
void weil_algebra_free(struct WeilAlgebraHandle *a);

/*
 # Safety
 `a` must be a live algebra handle; `out` must be writable.
 */
enum WeilStatus weil_algebra_dim(const struct WeilAlgebraHandle *a, size_t *out);

/*
 # Safety
 `a` must be a live algebra handle; `out` must be writable.
 */
enum WeilStatus weil_algebra_nilpotency_order(const struct WeilAlgebraHandle *a, size_t *out);

/*
 Writes `a_i * a_j` as `dim` coefficients into `out`, converted to double.

 # Safety
 `a` must be a live algebra handle; `out` must hold `dim` doubles.
 */
enum WeilStatus weil_algebra_basis_product(const struct WeilAlgebraHandle *a,
                                           size_t i,
                                           size_t j,
                                           double *out);

/*
 Human-readable summary: basis, nilpotency, multiplication table and the
 Gram forms of the preset functionals.

 # Safety
 `a` must be a live algebra handle; `out` must be writable.
 */
enum WeilStatus weil_algebra_info(const struct WeilAlgebraHandle *a, char **out);

/*
 Parses a structure manifest from JSON text.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum WeilStatus weil_manifest_parse(const char *json, struct WeilManifest **out);

/*
 # Safety
 `m` must be null or a handle from [`weil_manifest_parse`], freed once.
 */
void weil_manifest_free(struct WeilManifest *m);

/*
 Verifies the base structure. `seed` overrides the manifest's seed when
 `has_seed` is true.

 # Safety
 `m` must be a live manifest handle; `out` must be writable.
 */
enum WeilStatus weil_verify(const struct WeilManifest *m,
                            bool has_seed,
                            uint64_t seed,
                            struct WeilReport **out);

/*
 Lifts the structure and re-verifies it on the lifted patch.

 # Safety
 `m` must be a live manifest handle; `out` must be writable.
 */
enum WeilStatus weil_lift(const struct WeilManifest *m,
                          bool has_seed,
                          uint64_t seed,
                          struct WeilReport **out);

/*
 Compares the canonical and averaged lifts of the manifest's vector field.

 # Safety
 `m` must be a live manifest handle; `out` must be writable.
 */
enum WeilStatus weil_compare_lifts(const struct WeilManifest *m,
                                   bool has_seed,
                                   uint64_t seed,
                                   struct WeilReport **out);

/*
 Runs a named demo.

 # Safety
 `name` must be a NUL-terminated string; `out` must be writable.
 */
enum WeilStatus weil_demo(const char *name,
                          bool has_seed,
                          uint64_t seed,
                          bool slow,
                          struct WeilReport **out);

/*
 # Safety
 `r` must be null or a report handle, freed once.
 */
void weil_report_free(struct WeilReport *r);

/*
 Whether every section of the report met its expectation.

 # Safety
 `r` must be a live report handle; `out` must be writable.
 */
enum WeilStatus weil_report_passed(const struct WeilReport *r, bool *out);

/*
 # Safety
 `r` must be a live report handle; `out` must be writable.
 */
enum WeilStatus weil_report_render(const struct WeilReport *r, enum WeilFormat format, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEIL_H */
