#ifndef DQLAB_H
#define DQLAB_H

/* C interface to the dqlab library. Every function that can fail returns a
 * dqlab_status; on failure dqlab_last_error() describes the error for the
 * calling thread. Handles are opaque and owned by the caller. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(DQLAB_BUILDING)
#    define DQLAB_API __declspec(dllexport)
#  else
#    define DQLAB_API __declspec(dllimport)
#  endif
#else
#  define DQLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dqlab_status {
    DQLAB_OK = 0,
    DQLAB_ERR_INVALID_ARGUMENT = 1,
    DQLAB_ERR_CONFIG = 2,
    DQLAB_ERR_IO = 3,
    DQLAB_ERR_DOMAIN = 4,
    DQLAB_ERR_DIVERGED = 5,
    DQLAB_ERR_FIT = 6,
    DQLAB_ERR_INTERNAL = 7
} dqlab_status;

typedef struct dqlab_config dqlab_config;
typedef struct dqlab_run dqlab_run;

DQLAB_API const char* dqlab_version(void);
/* Message of the last failed call on this thread; "" if none. */
DQLAB_API const char* dqlab_last_error(void);
DQLAB_API const char* dqlab_status_name(dqlab_status status);

/* ---- configuration ---- */
DQLAB_API dqlab_status dqlab_config_parse(const char* text, dqlab_config** out);
DQLAB_API dqlab_status dqlab_config_load(const char* path, dqlab_config** out);
DQLAB_API void dqlab_config_free(dqlab_config* config);
/* Canonical key=value text. Writes at most `cap` bytes including the
 * terminator; `needed` (optional) receives the full size including it. */
DQLAB_API dqlab_status dqlab_config_render(const dqlab_config* config, char* buf, size_t cap, size_t* needed);

/* ---- simulation ---- */
DQLAB_API dqlab_status dqlab_simulate(const dqlab_config* config, dqlab_run** out);
DQLAB_API void dqlab_run_free(dqlab_run* run);
DQLAB_API size_t dqlab_run_sample_count(const dqlab_run* run);
/* Copies min(cap, sample_count) values of a CSV column into `out`. */
DQLAB_API dqlab_status dqlab_run_column(const dqlab_run* run, const char* name, double* out, size_t cap);
/* 1 when every invariant check passed, else 0. */
DQLAB_API int dqlab_run_checks_passed(const dqlab_run* run);
/* Names of failed checks, one per line. Same buffer rules as config_render. */
DQLAB_API dqlab_status dqlab_run_failures(const dqlab_run* run, char* buf, size_t cap, size_t* needed);
/* "key=value" lines written above the CSV header. */
DQLAB_API dqlab_status dqlab_run_metadata(const dqlab_run* run, char* buf, size_t cap, size_t* needed);
DQLAB_API dqlab_status dqlab_run_write_csv(const dqlab_run* run, const char* path);

/* ---- slow-set certificate ---- */
typedef struct dqlab_certificate {
    double p, nu, delta, rho, R, alpha;
    double sigma0, sigma1;
    double cond1_margin, cond2_margin, cond3_margin;
    int member;
    double envelope_y0, envelope_rate;
} dqlab_certificate;

/* Resolves the config's auto values and certifies its initial data.
 * DQLAB_ERR_DOMAIN when u0 = 0. */
DQLAB_API dqlab_status dqlab_certify(const dqlab_config* config, dqlab_certificate* out);
DQLAB_API dqlab_status dqlab_certificate_format(const dqlab_certificate* cert, char* buf, size_t cap,
                                                size_t* needed);

/* ---- fitting ---- */
typedef struct dqlab_slope_fit {
    double exponent, intercept, r_squared, t_min, t_max;
    int n_points;
} dqlab_slope_fit;

DQLAB_API dqlab_status dqlab_fit_csv(const char* path, const char* column, double t_min, double t_max,
                                     dqlab_slope_fit* out);
DQLAB_API dqlab_status dqlab_fit_series(const double* t, const double* values, size_t n, double t_min, double t_max,
                                        dqlab_slope_fit* out);
DQLAB_API dqlab_status dqlab_slope_fit_format(const dqlab_slope_fit* fit, char* buf, size_t cap, size_t* needed);

/* ---- scalar ODE oracle and sweeps ---- */
/* Integrates v'' + v' + |v|^p v = 0 and writes t,v,v_dot,v_pred. dt <= 0
 * selects 0.05. */
DQLAB_API dqlab_status dqlab_oracle_write(double p, double v0, double v1, double dt, double t_end, const char* path);
/* Writes run_NNN.csv per amplitude plus summary.csv. `failed_runs`
 * (optional) receives the number of runs that threw or failed a check. */
DQLAB_API dqlab_status dqlab_sweep(const dqlab_config* config, const double* amplitudes, size_t n,
                                   const char* out_dir, int workers, size_t* failed_runs);

#ifdef __cplusplus
}
#endif

#endif /* DQLAB_H */
