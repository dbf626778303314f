#ifndef INNERVAR_INNERVAR_H
#define INNERVAR_INNERVAR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define INNERVAR_API __declspec(dllexport)
#else
#define INNERVAR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; nonzero values other than INNERVAR_INTERNAL match the
   library's error kinds. */
typedef enum innervar_status {
  INNERVAR_OK = 0,
  INNERVAR_NON_INVERTIBLE = 1,
  INNERVAR_UNSUPPORTED_BOUNDARY = 2,
  INNERVAR_TUBE_TOO_NARROW = 3,
  INNERVAR_STIFF_TAIL = 4,
  INNERVAR_EPSILON_TOO_LARGE = 5,
  INNERVAR_DIMENSION_MISMATCH = 6,
  INNERVAR_DEGENERATE_REFERENCE = 7,
  INNERVAR_CONFIG_ERROR = 8,
  INNERVAR_NUMERICAL_FAILURE = 9,
  INNERVAR_INVALID_ARGUMENT = 10,
  INNERVAR_INTERNAL = 11
} innervar_status;

typedef struct innervar_result innervar_result;

typedef struct innervar_run_options {
  int has_seed;
  uint64_t seed;
  /* Worker threads; 0 keeps the default. */
  int jobs;
} innervar_run_options;

INNERVAR_API const char* innervar_version(void);
INNERVAR_API const char* innervar_status_name(int status);
/* Message of the last failed call on this thread. */
INNERVAR_API const char* innervar_last_error(void);

/* int_{-1}^{1} W(s)^((p-1)/p) ds with W = (1 - s^2)^2. */
INNERVAR_API int innervar_c_p(double p, double* out);
/* Optimal profile q and its first three derivatives at s. */
INNERVAR_API int innervar_profile_eval(double p, double s, double out[4]);

/* Runs a config; *out receives a result handle even when some cases fail.
   Config problems return INNERVAR_CONFIG_ERROR and leave *out NULL. */
INNERVAR_API int innervar_run_file(const char* path, const innervar_run_options* options, innervar_result** out);
INNERVAR_API int innervar_run_text(const char* json_text, const char* name, const innervar_run_options* options,
                                   innervar_result** out);
INNERVAR_API int innervar_run_builtin(const char* name, const innervar_run_options* options, innervar_result** out);

INNERVAR_API int innervar_result_pass(const innervar_result* r);
INNERVAR_API const char* innervar_result_name(const innervar_result* r);
/* JSON summary, format version 1. */
INNERVAR_API const char* innervar_result_summary(const innervar_result* r);
INNERVAR_API size_t innervar_result_case_count(const innervar_result* r);
INNERVAR_API const char* innervar_result_case_name(const innervar_result* r, size_t i);
INNERVAR_API const char* innervar_result_case_csv(const innervar_result* r, size_t i);
INNERVAR_API int innervar_result_case_pass(const innervar_result* r, size_t i);
/* <dir>/<case>.csv and <dir>/summary.json. */
INNERVAR_API int innervar_result_write(const innervar_result* r, const char* dir);
INNERVAR_API void innervar_result_free(innervar_result* r);

INNERVAR_API size_t innervar_builtin_count(void);
INNERVAR_API const char* innervar_builtin_name(size_t i);
INNERVAR_API const char* innervar_builtin_description(size_t i);
INNERVAR_API const char* innervar_builtin_text(size_t i);

#ifdef __cplusplus
}
#endif

#endif
