#ifndef NHKZ_NHKZ_H
#define NHKZ_NHKZ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NHKZ_BUILDING_LIBRARY)
#    define NHKZ_API __declspec(dllexport)
#  else
#    define NHKZ_API __declspec(dllimport)
#  endif
#else
#  define NHKZ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
typedef enum nhkz_status {
  NHKZ_OK = 0,
  NHKZ_INVALID_ARGUMENT = 1,
  NHKZ_NOT_HERMITIAN = 2,
  NHKZ_DEGENERATE = 3,
  NHKZ_NON_CONVERGENCE = 4,
  NHKZ_EP_PROXIMITY = 5,
  NHKZ_FIT_FAILURE = 6,
  NHKZ_CONFIG = 7,
  NHKZ_IO = 8,
  NHKZ_EMPTY_OVERLAP = 9,
  NHKZ_INTERNAL = 99
} nhkz_status;

typedef struct nhkz_config nhkz_config;

NHKZ_API const char* nhkz_version(void);
NHKZ_API const char* nhkz_status_name(int status);
/* Message of the last failed call on this thread; "" if none. */
NHKZ_API const char* nhkz_last_error(void);

NHKZ_API int nhkz_config_load(const char* path, nhkz_config** out);
NHKZ_API int nhkz_config_parse(const char* text, nhkz_config** out);
NHKZ_API void nhkz_config_free(nhkz_config* config);
NHKZ_API int nhkz_config_set_output(nhkz_config* config, const char* directory);
NHKZ_API int nhkz_config_set_workers(nhkz_config* config, unsigned workers);
NHKZ_API int nhkz_config_set_seed(nhkz_config* config, uint64_t seed);
/* Protocol name ("hermitian", "pt", "full", "ep4"); valid while config lives. */
NHKZ_API const char* nhkz_config_protocol(const nhkz_config* config);

#define NHKZ_MAX_REGIONS 2

typedef struct nhkz_scaling_summary {
  int n_regions;
  double predicted_exponent;
  double alpha[NHKZ_MAX_REGIONS];
  double alpha_stderr[NHKZ_MAX_REGIONS];
  double r_squared[NHKZ_MAX_REGIONS];
  double collapse_quality[NHKZ_MAX_REGIONS];
} nhkz_scaling_summary;

NHKZ_API int nhkz_run_profile(const nhkz_config* config, int* files_written);
/* summary may be NULL. On NHKZ_FIT_FAILURE the files are still written. */
NHKZ_API int nhkz_run_scaling(const nhkz_config* config, nhkz_scaling_summary* summary);
/* unmet_goals counts targets whose distance missed the goal; may be NULL. */
NHKZ_API int nhkz_run_compile(const nhkz_config* config, int* targets, int* unmet_goals);
NHKZ_API int nhkz_run_spectrum(const nhkz_config* config);
NHKZ_API int nhkz_run_selftest(const nhkz_config* config, int* checks, int* failed);

/* Direct library calls. Complex matrices are row-major, interleaved re/im. */
NHKZ_API int nhkz_spectrum_h4(double p, double delta, double gamma, double energies[8]);
NHKZ_API int nhkz_fit_power_law(const double* tau, const double* value, size_t count, double* alpha,
                                double* alpha_stderr, double* r_squared);
NHKZ_API int nhkz_distance(const double* u, const double* v, size_t dimension, double* out);
/* angles = (r1.theta, r1.phi, r1.vartheta, r2.theta, r2.phi, r2.vartheta, phi_h, phi_v),
   global = (re, im). */
NHKZ_API int nhkz_decompose_2x2(const double target[8], double angles[8], double global[2],
                                double* residual);

#ifdef __cplusplus
}
#endif

#endif
