/*
 * hstn - spectrum-sharing resource allocation for hybrid
 * satellite-terrestrial networks, driven by large-scale CSI only.
 *
 * C API of the shared library. All functions return a status code
 * (HSTN_OK on success); on failure hstn_last_error() gives a one-line
 * description for the calling thread. Objects are opaque handles owned
 * by the library and released with the matching *_free function.
 * Strings returned through char** are released with hstn_string_free.
 */
#ifndef HSTN_H
#define HSTN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HSTN_API __declspec(dllexport)
#else
#define HSTN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum hstn_status {
  HSTN_OK = 0,
  HSTN_ERR_CONFIG = 1,   /* malformed or inconsistent configuration */
  HSTN_ERR_IO = 2,       /* file could not be read or written */
  HSTN_ERR_INVALID = 3,  /* invalid argument (null handle, bad size) */
  HSTN_ERR_INTERNAL = 4  /* unexpected internal failure */
};

typedef struct hstn_scenario_s hstn_scenario;
typedef struct hstn_result_s hstn_result;

/* ---- scenario ------------------------------------------------------- */

/* Reference setup: 4 BSs, 3 pairs, 4 antennas, noise -107 dBm, leakage
 * cap -117 dBm, suppression -20 dB, budgets 20 dBm. */
HSTN_API int hstn_scenario_default(hstn_scenario** out);

/* Parse and validate a scenario JSON document (see README for the schema). */
HSTN_API int hstn_scenario_from_json(const char* json_text, hstn_scenario** out);
HSTN_API int hstn_scenario_from_file(const char* path, hstn_scenario** out);

HSTN_API int hstn_scenario_to_json(const hstn_scenario* s, char** json_out);
HSTN_API void hstn_scenario_free(hstn_scenario* s);

/* ---- end-to-end solve ------------------------------------------------ */

/* Draws a deployment and large-scale fading from the seed, solves the
 * per-pair power allocations, and matches users to channels. */
HSTN_API int hstn_solve(const hstn_scenario* s, uint64_t seed, hstn_result** out);

HSTN_API int hstn_result_num_users(const hstn_result* r, int* out);
HSTN_API int hstn_result_sum_rate(const hstn_result* r, double* out);

/* channels[i] = channel assigned to user i; len must be >= the user count. */
HSTN_API int hstn_result_assignment(const hstn_result* r, int* channels, size_t len);

/* Full report: assignment, per-pair rates, power vectors, leakage. */
HSTN_API int hstn_result_to_json(const hstn_result* r, char** json_out);
HSTN_API void hstn_result_free(hstn_result* r);

/* ---- experiments ------------------------------------------------------ */

/* Runs the sweep described by an experiment spec JSON document and writes
 * the CSV to out_csv_path (or returns it via hstn_sweep_to_string). */
HSTN_API int hstn_sweep_run(const char* spec_json, uint64_t seed, int threads,
                            const char* out_csv_path);
HSTN_API int hstn_sweep_to_string(const char* spec_json, uint64_t seed, int threads,
                                  char** csv_out);

/* Compares the deterministic-equivalent rates against Monte Carlo link
 * simulation; writes per-pair rows as CSV and returns a JSON summary with
 * the median and maximum relative gap. summary_json_out may be NULL. */
HSTN_API int hstn_validate_approx(const char* spec_json, uint64_t seed, int threads,
                                  const char* out_csv_path, char** summary_json_out);

/* ---- misc ------------------------------------------------------------- */

/* Last error message of the calling thread; empty string if none. */
HSTN_API const char* hstn_last_error(void);

HSTN_API const char* hstn_status_name(int status);
HSTN_API void hstn_string_free(char* s);
HSTN_API const char* hstn_version(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HSTN_H */
