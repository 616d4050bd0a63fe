/* C interface to the low-rank recovery geometry library.
 *
 * Every function returns an lrg_status. On failure the message is
 * available from lrg_last_error() on the calling thread until the next call.
 * Strings returned through char** must be released with lrg_string_free().
 */
#ifndef LRGEOM_H
#define LRGEOM_H

#include <stddef.h>
#include <stdint.h>

#if defined(LRGEOM_BUILDING)
#define LRG_API __attribute__((visibility("default")))
#else
#define LRG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrg_status {
  LRG_OK = 0,
  LRG_ERR_ARGUMENT = 1,
  LRG_ERR_DIMENSION = 2,
  LRG_ERR_NUMERIC = 3,
  LRG_ERR_INTEGRITY = 4,
  LRG_ERR_ADMISSIBILITY = 5,
  LRG_ERR_DEGENERATE = 6,
  LRG_ERR_CONFIG = 7,
  LRG_ERR_IO = 8,
  LRG_ERR_INTERNAL = 99
} lrg_status;

typedef struct lrg_frame lrg_frame;
typedef struct lrg_deconv lrg_deconv;
typedef struct lrg_completion lrg_completion;

LRG_API const char* lrg_last_error(void);
LRG_API const char* lrg_build_id(void);
LRG_API void lrg_string_free(char* s);

/* Frames. kind is "tetris", "repeated" or "haar" (seed used by haar only). */
LRG_API lrg_status lrg_frame_create(const char* kind, int64_t L, int64_t K, uint64_t seed, lrg_frame** out);
LRG_API lrg_status lrg_frame_load(const char* stem, lrg_frame** out);
LRG_API lrg_status lrg_frame_save(const lrg_frame* f, const char* stem);
LRG_API lrg_status lrg_frame_dims(const lrg_frame* f, int64_t* L, int64_t* K);
/* Copies B (column-major, interleaved re/im, 2*L*K doubles). */
LRG_API lrg_status lrg_frame_copy(const lrg_frame* f, double* out, size_t len);
/* JSON: dimensions, coherence, integrity checks, block sizes. */
LRG_API lrg_status lrg_frame_info_json(const lrg_frame* f, char** out_json);
LRG_API void lrg_frame_free(lrg_frame* f);

/* Blind deconvolution instance; signal is "gaussian" or "flat". */
LRG_API lrg_status lrg_deconv_create(const lrg_frame* f, int64_t N, uint64_t seed, const char* signal,
                                     lrg_deconv** out);
LRG_API lrg_status lrg_deconv_load(const char* stem, lrg_deconv** out);
LRG_API lrg_status lrg_deconv_save(const lrg_deconv* d, const char* stem);
LRG_API lrg_status lrg_deconv_fft_consistency(const lrg_deconv* d, double* out);
/* Certificate summary plus one adversarial-noise report per t in ts. */
LRG_API lrg_status lrg_deconv_certificate_json(const lrg_deconv* d, const double* ts, size_t nt,
                                               char** out_json);
LRG_API void lrg_deconv_free(lrg_deconv* d);

LRG_API lrg_status lrg_completion_create(int64_t n1, int64_t n2, int64_t r, int64_t m, uint64_t seed,
                                         lrg_completion** out);
LRG_API lrg_status lrg_completion_save(const lrg_completion* c, const char* stem);
LRG_API lrg_status lrg_completion_certificate_json(const lrg_completion* c, const double* ts, size_t nt,
                                                   char** out_json);
LRG_API void lrg_completion_free(lrg_completion* c);

/* Solves min ||X||_* s.t. ||A(X) - y|| <= tau with y = A(X0) + e, ||e|| = tau.
 * noise: "none", "random" or "certificate". solver_json may be NULL.
 * trace_csv, if non-NULL, receives the iteration trace as CSV. */
LRG_API lrg_status lrg_deconv_solve_json(const lrg_deconv* d, double tau, const char* noise,
                                         const char* solver_json, char** out_json, char** trace_csv);
LRG_API lrg_status lrg_completion_solve_json(const lrg_completion* c, double tau, const char* noise,
                                             const char* solver_json, char** out_json, char** trace_csv);

/* Experiments. config_json follows the documented schema. */
LRG_API lrg_status lrg_default_config(const char* experiment, char** out_json);
LRG_API lrg_status lrg_run_experiment(const char* config_json, char** summary_json, char** csv);
LRG_API lrg_status lrg_run_checks(const char* config_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* LRGEOM_H */
