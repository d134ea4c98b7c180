/* C interface to the rhlab analysis library. */
#ifndef RHLAB_H
#define RHLAB_H

#include <stddef.h>

#if defined(_WIN32)
#  define RHLAB_API __declspec(dllexport)
#else
#  define RHLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rhlab_status {
    RHLAB_OK = 0,
    RHLAB_ERR_PARSE = 2,     /* operator text or JSON input could not be read */
    RHLAB_ERR_PIPELINE = 3,  /* analysis failed (domain or numerical error) */
    RHLAB_ERR_INVALID = 4,   /* Stokes data failed validation */
    RHLAB_ERR_ARGUMENT = 5   /* null pointer or out-of-range option */
} rhlab_status;

typedef struct rhlab_operator rhlab_operator;
typedef struct rhlab_report rhlab_report;

typedef struct rhlab_analyze_options {
    int at_infinity;
    int order;
    int numeric;
    double radius;      /* <= 0: default */
    double half_width;  /* <= 0: default */
} rhlab_analyze_options;

typedef struct rhlab_plot_options {
    int at_infinity;
    double radius;
    double rho;
    double sigma;  /* <= 0: amplitude 0.5 */
    int samples;
} rhlab_plot_options;

RHLAB_API void rhlab_analyze_options_init(rhlab_analyze_options* opts);
RHLAB_API void rhlab_plot_options_init(rhlab_plot_options* opts);

RHLAB_API const char* rhlab_version(void);

/* Message of the last failure on the calling thread; empty when none. */
RHLAB_API const char* rhlab_last_error(void);
/* Kind of the last failure ("parse", "schema", "domain", "pipeline", ...). */
RHLAB_API const char* rhlab_last_error_kind(void);
/* Position of the last parse error (1-based), 0 when not applicable. */
RHLAB_API int rhlab_last_error_line(void);
RHLAB_API int rhlab_last_error_column(void);

RHLAB_API rhlab_status rhlab_operator_parse(const char* text, rhlab_operator** out);
RHLAB_API void rhlab_operator_free(rhlab_operator* op);
/* Order and canonical text; the string must be released with rhlab_string_free. */
RHLAB_API int rhlab_operator_order(const rhlab_operator* op);
RHLAB_API rhlab_status rhlab_operator_to_string(const rhlab_operator* op, char** out);
RHLAB_API int rhlab_operator_is_fuchsian(const rhlab_operator* op, int at_infinity);

RHLAB_API rhlab_status rhlab_analyze(const rhlab_operator* op, const rhlab_analyze_options* opts, rhlab_report** out);
RHLAB_API void rhlab_report_free(rhlab_report* rep);
/* indent < 0 gives compact output. */
RHLAB_API rhlab_status rhlab_report_json(const rhlab_report* rep, int indent, char** out);

/* Validates report JSON against optional candidate matrices JSON (may be NULL).
   Writes {"valid", "violations"} to result_json; returns RHLAB_ERR_INVALID when not valid. */
RHLAB_API rhlab_status rhlab_check_stokes(const char* report_json, const char* matrices_json, double tol,
                                          char** result_json);

/* CSV rows and SVG text of the plot; svg may be NULL. */
RHLAB_API rhlab_status rhlab_plot(const rhlab_operator* op, const rhlab_plot_options* opts, char** csv, char** svg);

RHLAB_API void rhlab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* RHLAB_H */
