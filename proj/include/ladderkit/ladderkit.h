#ifndef LADDERKIT_H
#define LADDERKIT_H

/* C interface to libladderkit. Every call returns an lk_status; on failure
 * lk_last_error() describes the problem (per thread, valid until the next call).
 * Strings handed out through char** must be released with lk_string_free. */

#include <stddef.h>

#if defined(_WIN32)
#  define LK_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define LK_API __attribute__((visibility("default")))
#else
#  define LK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct lk_chain lk_chain;

typedef enum {
    LK_OK = 0,
    LK_CHECK_FAILED = 1, /* a numerical check ran and failed */
    LK_INPUT_ERROR = 2,  /* bad config, argument or precondition */
    LK_INTERNAL = 3
} lk_status;

typedef enum {
    LK_FORMAT_CONFIG = 0, /* whatever output.format in the config says */
    LK_FORMAT_JSON = 1,
    LK_FORMAT_CSV = 2
} lk_format;

LK_API const char* lk_version(void);
LK_API const char* lk_last_error(void);

/* Parse a config and build its chain (faults included). */
LK_API lk_status lk_chain_from_config(const char* json_text, lk_chain** out);
LK_API lk_status lk_chain_from_file(const char* path, lk_chain** out);
LK_API void lk_chain_free(lk_chain* chain);

LK_API int lk_chain_depth(const lk_chain* chain);
/* output.path from the config, or NULL. Owned by the chain. */
LK_API const char* lk_chain_output_path(const lk_chain* chain);
/* LK_FORMAT_JSON or LK_FORMAT_CSV as configured. */
LK_API lk_format lk_chain_format(const lk_chain* chain);

/* Reports. level < 0 (and degree < 0, seed < 0) select the defaults.
 * *passed is 1 when every check holds; LK_OK means the report was produced. */
LK_API lk_status lk_verify(const lk_chain* chain, long long seed, lk_format format, char** report,
                           int* passed);
LK_API lk_status lk_spectrum(const lk_chain* chain, int level, lk_format format, char** report,
                             int* passed);
/* *gram receives the Gram report as JSON in CSV mode and NULL otherwise; gram may be NULL. */
LK_API lk_status lk_poly(const lk_chain* chain, int level, int degree, lk_format format,
                         char** report, char** gram, int* passed);
LK_API lk_status lk_weight(const lk_chain* chain, int level, lk_format format, char** report,
                           int* passed);

/* {"command", "pass": false, "error"} as JSON, for reporting a failed build. */
LK_API char* lk_failure_report(const char* command, const char* error);

/* Ascending eigenvalues of the symmetric tridiagonal matrix (diag[n], off[n-1]). */
LK_API lk_status lk_tridiagonal_eigenvalues(const double* diag, const double* off, size_t n,
                                            double* values);

LK_API void lk_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
