#ifndef LKREG_LKREG_H
#define LKREG_LKREG_H

/* C interface to the Landweber-Kaczmarz experiment library.
 *
 * Every function returning lkreg_status stores a message retrievable with
 * lkreg_last_error() on failure. Messages are per thread. */

#include <stddef.h>

#if defined(_WIN32)
#define LKREG_API __declspec(dllexport)
#else
#define LKREG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lkreg_status {
  LKREG_OK = 0,
  LKREG_ERR_USAGE = 1,   /* bad argument, config or geometry */
  LKREG_ERR_NUMERIC = 2, /* non-finite iterate, solver breakdown */
  LKREG_ERR_IO = 3,
  LKREG_ERR_INTERNAL = 4
} lkreg_status;

typedef struct lkreg_config lkreg_config;
typedef struct lkreg_result lkreg_result;

typedef struct lkreg_cycle_info {
  const char* method; /* "lk", "llk" or "elk" */
  size_t cycle;
  size_t active;
  size_t visited;
  int has_error;
  double error; /* relative L2 error, valid when has_error != 0 */
} lkreg_cycle_info;

typedef void (*lkreg_cycle_fn)(const lkreg_cycle_info* info, void* user);

LKREG_API const char* lkreg_last_error(void);
LKREG_API const char* lkreg_status_name(lkreg_status status);

/* Defaults reproduce the 5% uniform-noise TAT run with the loping method. */
LKREG_API lkreg_status lkreg_config_create(lkreg_config** out);
LKREG_API lkreg_status lkreg_config_load(const char* path, lkreg_config** out);
LKREG_API void lkreg_config_destroy(lkreg_config* config);
LKREG_API lkreg_status lkreg_config_set(lkreg_config* config, const char* key,
                                        const char* value);
/* "key=value" */
LKREG_API lkreg_status lkreg_config_override(lkreg_config* config, const char* assignment);
LKREG_API lkreg_status lkreg_config_validate(const lkreg_config* config);
/* Copies the config text (NUL-terminated) into buf when it fits; *needed
 * receives the required size including the terminator. */
LKREG_API lkreg_status lkreg_config_text(const lkreg_config* config, char* buf, size_t cap,
                                         size_t* needed);
/* Value of one key in text form, same buffer protocol as above. */
LKREG_API lkreg_status lkreg_config_get(const lkreg_config* config, const char* key, char* buf,
                                        size_t cap, size_t* needed);

LKREG_API lkreg_status lkreg_write_phantom(const lkreg_config* config);
LKREG_API lkreg_status lkreg_simulate(const lkreg_config* config);
/* `on_cycle` may be NULL. */
LKREG_API lkreg_status lkreg_run_experiment(const lkreg_config* config, lkreg_cycle_fn on_cycle,
                                            void* user, lkreg_result** out);
/* Summary recomputed from <dir>/trace.csv; the result has no solution. */
LKREG_API lkreg_status lkreg_report(const char* dir, lkreg_result** out);

LKREG_API void lkreg_result_destroy(lkreg_result* result);
LKREG_API size_t lkreg_result_cycles(const lkreg_result* result);
LKREG_API int lkreg_result_converged(const lkreg_result* result);
LKREG_API size_t lkreg_result_active_steps(const lkreg_result* result);
LKREG_API size_t lkreg_result_visited_steps(const lkreg_result* result);
LKREG_API double lkreg_result_loped_fraction(const lkreg_result* result);
/* Returns 1 and writes *out when the final error is known, else 0. */
LKREG_API int lkreg_result_final_error(const lkreg_result* result, double* out);
/* key = value lines; owned by the result. */
LKREG_API const char* lkreg_result_summary_text(const lkreg_result* result);
/* Grid side M of the solution, 0 when there is none. */
LKREG_API size_t lkreg_result_grid_side(const lkreg_result* result);
/* Copies M*M row-major values; count must equal M*M. */
LKREG_API lkreg_status lkreg_result_solution(const lkreg_result* result, double* buf,
                                             size_t count);

#ifdef __cplusplus
}
#endif

#endif
