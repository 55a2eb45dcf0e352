#ifndef SELFSIM_H
#define SELFSIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SELFSIM_OK 0

// The computation finished without a result (no witness, inconclusive).
#define SELFSIM_NO_RESULT 1

#define SELFSIM_INVALID_INPUT 2

#define SELFSIM_NULL_POINTER 3

#define SELFSIM_INVALID_UTF8 4

#define SELFSIM_PANIC 5

// Opaque handle to an iterated function system.
typedef struct selfsim_ifs_t selfsim_ifs_t;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a JSON system definition (`maps` or `digits` form).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
int32_t selfsim_ifs_from_json(const char *json, struct selfsim_ifs_t **out);

// # Safety
// `ifs` must come from `selfsim_ifs_from_json` and not be freed twice.
void selfsim_ifs_free(struct selfsim_ifs_t *ifs);

// Number of maps, 0 for a null handle.
//
// # Safety
// `ifs` must be null or a live handle.
size_t selfsim_ifs_len(const struct selfsim_ifs_t *ifs);

// Canonical `maps` JSON of the system.
//
// # Safety
// `ifs` must be a live handle; `out` must be writable.
int32_t selfsim_ifs_to_json(const struct selfsim_ifs_t *ifs, char **out);

// Moran dimension enclosure of width at most `2^-precision_bits`, rounded
// outward to doubles.
//
// # Safety
// `ifs` must be a live handle; `lo` and `hi` must be writable.
int32_t selfsim_dimension(const struct selfsim_ifs_t *ifs,
                          uint32_t precision_bits,
                          double *lo,
                          double *hi);

// Runs one command-line command against `ifs` (which may be null for
// commands that need no system). `args_json` is a JSON array of strings,
// for example `["pfunction", "--samples", "8"]`. `*out` receives the
// command output, or the error document when the input is rejected.
// Returns `SELFSIM_OK`, `SELFSIM_NO_RESULT` or `SELFSIM_INVALID_INPUT`.
//
// # Safety
// `args_json` must be a NUL-terminated string; `out` must be writable;
// `ifs` must be null or a live handle.
int32_t selfsim_run(const struct selfsim_ifs_t *ifs, const char *args_json, char **out);

// Message of the last failed call on this thread, or null. Valid until
// the next library call on the same thread.
const char *selfsim_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void selfsim_string_free(char *s);

// Library version, a static string.
const char *selfsim_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SELFSIM_H */
