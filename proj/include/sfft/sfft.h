#ifndef SFFT_SFFT_H
#define SFFT_SFFT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SFFT_BUILDING)
#define SFFT_API __declspec(dllexport)
#else
#define SFFT_API __declspec(dllimport)
#endif
#else
#define SFFT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sfft_status {
  SFFT_OK = 0,
  SFFT_ERR_PARAMETER = 1,  /* invalid argument or parameter combination */
  SFFT_ERR_DIMENSION = 2,  /* grids or index sizes do not agree */
  SFFT_ERR_DIVERGENCE = 3, /* residual grew beyond the guard factor */
  SFFT_ERR_IO = 4,
  SFFT_ERR_SCALE = 5,      /* problem too large for a brute-force routine */
  SFFT_ERR_INTERNAL = 6
} sfft_status;

typedef struct sfft_signal sfft_signal;
typedef struct sfft_result sfft_result;
typedef struct sfft_experiment sfft_experiment;

/* Message for the last failing call on this thread, or "" if none. */
SFFT_API const char* sfft_last_error(void);
SFFT_API const char* sfft_status_name(sfft_status status);
SFFT_API const char* sfft_version(void);

/* Zero for B, F, r_max, c_max, T and seed-derived fields means "use the default". */
typedef struct sfft_params {
  uint64_t k;
  double epsilon;
  double mu;
  double r_star;
  uint64_t B;
  int F;
  int r_max;
  int c_max;
  int T;
  uint64_t seed;
} sfft_params;

SFFT_API void sfft_params_default(sfft_params* params);

/* Spectrum samples on [n]^d, row-major, interleaved re/im (2 * n^d doubles). */
SFFT_API sfft_status sfft_signal_create(int64_t n, int d, const double* interleaved, sfft_signal** out);
/* Spectrum of a time-domain vector given by its nonzero entries (flat indices). */
SFFT_API sfft_status sfft_signal_from_sparse(int64_t n, int d, size_t count, const uint64_t* flat, const double* interleaved, sfft_signal** out);
SFFT_API void sfft_signal_destroy(sfft_signal* signal);
SFFT_API uint64_t sfft_signal_size(const sfft_signal* signal);

SFFT_API sfft_status sfft_recover(const sfft_signal* spectrum, const sfft_params* params, sfft_result** out);
SFFT_API void sfft_result_destroy(sfft_result* result);
SFFT_API size_t sfft_result_count(const sfft_result* result);
/* Entries in increasing flat index order. */
SFFT_API sfft_status sfft_result_entry(const sfft_result* result, size_t i, uint64_t* flat, double* re, double* im);

typedef struct sfft_sample_report {
  uint64_t location;
  uint64_t estimation;
  uint64_t inf_norm;
  uint64_t const_snr;
  uint64_t total;
} sfft_sample_report;

SFFT_API sfft_status sfft_result_samples(const sfft_result* result, sfft_sample_report* out);

/* Experiments described by the JSON spec format of the command line tool. */
SFFT_API sfft_status sfft_experiment_from_json(const char* json_text, sfft_experiment** out);
SFFT_API sfft_status sfft_experiment_from_file(const char* path, sfft_experiment** out);
SFFT_API void sfft_experiment_destroy(sfft_experiment* experiment);
SFFT_API sfft_status sfft_experiment_set(sfft_experiment* experiment, const char* name, const char* value);
/* Runs every seed; threads <= 0 uses SFFT_THREADS or the hardware count.
   A NULL csv_path prints the CSV to stdout; a NULL json_path skips the sidecar. */
SFFT_API sfft_status sfft_experiment_run(const sfft_experiment* experiment, int threads, const char* csv_path, const char* json_path);
/* Sweeps one parameter over comma-separated values and writes the long-format CSV
   (stdout when the path is NULL). */
SFFT_API sfft_status sfft_experiment_sweep(const sfft_experiment* experiment, const char* param, const char* values, int threads, const char* tidy_csv_path);

/* Acquires location measurements for the spectrum and writes them in the binary dump format. */
SFFT_API sfft_status sfft_dump_measurements(const sfft_signal* spectrum, const sfft_params* params, const char* path);

#ifdef __cplusplus
}
#endif

#endif
