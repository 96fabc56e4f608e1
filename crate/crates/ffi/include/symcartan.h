#ifndef SYMCARTAN_H
#define SYMCARTAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SymcartanStatus {
  SYMCARTAN_STATUS_OK = 0,
  SYMCARTAN_STATUS_NULL_POINTER = 1,
  SYMCARTAN_STATUS_INVALID_UTF8 = 2,
  SYMCARTAN_STATUS_PARSE = 3,
  SYMCARTAN_STATUS_PRECONDITION = 4,
  SYMCARTAN_STATUS_NUMERICAL = 5,
  SYMCARTAN_STATUS_IO = 6,
  /*
   A verification run finished with failing checks.
   */
  SYMCARTAN_STATUS_CHECKS_FAILED = 7,
  SYMCARTAN_STATUS_PANIC = 8,
} SymcartanStatus;

/*
 Parsed field file.
 */
typedef struct SymcartanFields SymcartanFields;

/*
 Finished verification report.
 */
typedef struct SymcartanReport SymcartanReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or null. Valid until the next
 call on the same thread.
 */
const char *symcartan_last_error(void);

/*
 Library version as a static string.
 */
const char *symcartan_version(void);

void symcartan_string_free(char *s);

/*
 Parses a field file from JSON text.
 */
enum SymcartanStatus symcartan_fields_from_json(const char *json, struct SymcartanFields **out);

/*
 Reads a field file from disk.
 */
enum SymcartanStatus symcartan_fields_load(const char *path, struct SymcartanFields **out);

void symcartan_fields_free(struct SymcartanFields *fields);

/*
 Evaluates `action` (`cs`, `palatini`, `cs_omega_torsion`, `tmg`, `mm`) and
 writes the result as JSON. Couplings are rational strings such as `"1/3"`
 or null; `grid` 0 selects the default quadrature grid.
 */
enum SymcartanStatus symcartan_eval_action(const struct SymcartanFields *fields,
                                           const char *action,
                                           const char *c0,
                                           const char *c1,
                                           const char *mu,
                                           const char *gamma,
                                           size_t grid,
                                           char **out_json);

/*
 Runs the suites of a JSON configuration. The report is stored in `out`
 whenever the run completes, including when checks fail.
 */
enum SymcartanStatus symcartan_verify(const char *config_json, struct SymcartanReport **out);

/*
 1 when every check passed, 0 otherwise or on null.
 */
int32_t symcartan_report_passed(const struct SymcartanReport *report);

size_t symcartan_report_failed_count(const struct SymcartanReport *report);

enum SymcartanStatus symcartan_report_json(const struct SymcartanReport *report, char **out_json);

void symcartan_report_free(struct SymcartanReport *report);

/*
 Holonomy of a bundled rolling model around a JSON path, as JSON.
 */
enum SymcartanStatus symcartan_holonomy(const char *model,
                                        const char *path_json,
                                        size_t steps,
                                        char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMCARTAN_H */
