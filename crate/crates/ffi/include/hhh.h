/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef HHH_H
#define HHH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HhhStatus {
  HHH_STATUS_OK = 0,
  HHH_STATUS_MISMATCH = 1,
  HHH_STATUS_INVALID_INPUT = 2,
  HHH_STATUS_MISSING_BASE_CASE = 3,
  HHH_STATUS_NULL_POINTER = 4,
  HHH_STATUS_PARSE = 5,
  HHH_STATUS_IO = 6,
  HHH_STATUS_INTERNAL = 7,
} HhhStatus;

typedef enum HhhFormat {
  HHH_FORMAT_TEXT = 0,
  HHH_FORMAT_LATEX = 1,
  HHH_FORMAT_JSON = 2,
} HhhFormat;

// Recursion engine with its base-case table. Starts with the bundled
// `a = 0` entries.
typedef struct HhhEngine HhhEngine;

// A computed series `P / (1 - q)^e`.
typedef struct HhhSeries HhhSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates an engine. Returns null only on allocation failure.
struct HhhEngine *hhh_engine_new(void);

// # Safety
// `engine` must be null or a pointer from [`hhh_engine_new`] not yet freed.
void hhh_engine_free(struct HhhEngine *engine);

// Adds the entries of a base-case file to the engine's table.
//
// # Safety
// `engine` must be a live engine handle and `path` a NUL-terminated string.
enum HhhStatus hhh_engine_import_basecases(struct HhhEngine *engine, const char *path);

// HHH of the Coxeter braid with degrees `d[0..4]`; `a0` selects the `a = 0`
// specialization.
//
// # Safety
// `engine` must be a live engine handle, `d` must point to four `uint32_t`
// and `out` must be writable.
enum HhhStatus hhh_engine_compute(const struct HhhEngine *engine,
                                  const uint32_t *d,
                                  bool a0,
                                  struct HhhSeries **out);

// Parses a series from its canonical text form.
//
// # Safety
// `text` must be a NUL-terminated string and `out` writable.
enum HhhStatus hhh_series_parse(const char *text, struct HhhSeries **out);

// # Safety
// `series` must be null or a handle not yet freed.
void hhh_series_free(struct HhhSeries *series);

// Renders a series as text, LaTeX or JSON.
//
// # Safety
// `series` must be a live handle and `out` writable.
enum HhhStatus hhh_series_format(const struct HhhSeries *series, enum HhhFormat format, char **out);

// Coefficient of `q^q t^t a^a` in the power-series expansion.
//
// # Safety
// `series` must be a live handle and `out` writable.
enum HhhStatus hhh_series_coefficient(const struct HhhSeries *series,
                                      uint32_t q,
                                      int32_t t,
                                      uint32_t a,
                                      int64_t *out);

// Writes whether every expansion coefficient up to `order` is nonnegative.
//
// # Safety
// `series` must be a live handle and `out` writable.
enum HhhStatus hhh_series_is_positive(const struct HhhSeries *series, uint32_t order, bool *out);

// Bigraded Hilbert function of the ideal `J(d)` up to total degree
// `max_total`, in the text table format.
//
// # Safety
// `d` must point to four `uint32_t` and `out` must be writable.
enum HhhStatus hhh_hilb_table(const uint32_t *d, uint32_t max_total, char **out);

// Compares the engine's `a = 0` series with the ideal oracle. Writes the
// JSON report and returns `HHH_STATUS_MISMATCH` when the verdict is fail.
//
// # Safety
// `engine` must be a live handle, `d` must point to four `uint32_t` and
// `report` must be writable.
enum HhhStatus hhh_verify(const struct HhhEngine *engine,
                          const uint32_t *d,
                          uint32_t max_total,
                          char **report);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void hhh_string_free(char *s);

// Message for the most recent failure on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *hhh_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HHH_H */
