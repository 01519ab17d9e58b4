#ifndef STEINLAB_H
#define STEINLAB_H

/* C interface to the perturbed immigration-death laboratory.  All entry
 * points return SL_OK or an SL_ERR_* code; sl_last_error() describes the most
 * recent failure on the calling thread. */

#include <stddef.h>

#if defined(SL_BUILDING_SHARED)
#define SL_API __attribute__((visibility("default")))
#else
#define SL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
    SL_OK = 0,
    SL_ERR_INVALID_ARGUMENT = 1,
    SL_ERR_CAPACITY = 2,
    SL_ERR_NUMERIC = 3,
    SL_ERR_CONFIG = 4,
    SL_ERR_IO = 5,
    SL_ERR_UNKNOWN = 6
};

typedef struct sl_config sl_config;
typedef struct sl_run_result sl_run_result;

SL_API const char* sl_version(void);
SL_API const char* sl_last_error(void);

/* section is "uni", "multi" or "pp"; returns NULL on error. */
SL_API sl_config* sl_config_create(const char* section);
SL_API void sl_config_destroy(sl_config* cfg);
/* Flat key=value file, '#' comments.  Values are validated per key. */
SL_API int sl_config_load_file(sl_config* cfg, const char* path);
SL_API int sl_config_set(sl_config* cfg, const char* key, const char* value);

/* Runs the sweep.  SL_OK means the run completed; row-check failures are
 * reported through sl_result_exit_code / sl_result_message, not here. */
SL_API int sl_run(const sl_config* cfg, sl_run_result** out);
SL_API void sl_result_destroy(sl_run_result* res);
SL_API int sl_result_exit_code(const sl_run_result* res);
SL_API const char* sl_result_csv_path(const sl_run_result* res);
SL_API size_t sl_result_rows(const sl_run_result* res);
SL_API size_t sl_result_cols(const sl_run_result* res);
/* NULL when col is out of range. */
SL_API const char* sl_result_col_name(const sl_run_result* res, size_t col);
/* NaN when out of range. */
SL_API double sl_result_cell(const sl_run_result* res, size_t row, size_t col);
SL_API size_t sl_result_messages(const sl_run_result* res);
SL_API const char* sl_result_message(const sl_run_result* res, size_t i);

/* One-shot: the distance identity for the chain perturbed at k.  k <= 0 or
 * n_max <= 0 pick the defaults.  Output pointers may be NULL. */
SL_API int sl_uni_identity(double lambda, int k, int n_max, double* d_tv, double* p_k,
                           double* sup_dg, double* rel_err);
/* One-shot: sup over indicator h of |g_h(k+1) - g_h(k)|. */
SL_API int sl_uni_sup_delta_g(double lambda, int k, int n_max, double* out);
/* Fits y ~ c (log lambda)^q / lambda^p over >= 4 points; q is chosen in
 * {0, 1} by residual.  Output pointers may be NULL. */
SL_API int sl_fit_rate(const double* lambda, const double* y, size_t n, double* c, double* p,
                       int* q, double* rms);

#ifdef __cplusplus
}
#endif

#endif /* STEINLAB_H */
