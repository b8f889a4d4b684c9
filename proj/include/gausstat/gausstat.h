/* C interface of the gausstat library. All structured data crosses the boundary as
 * UTF-8 JSON strings ("schema": "gausstat/v1"); strings returned through `out`
 * parameters are owned by the caller and released with gs_string_free. */
#ifndef GAUSSTAT_H
#define GAUSSTAT_H

#include <stddef.h>

#if defined(GAUSSTAT_BUILDING)
#define GS_API __attribute__((visibility("default")))
#else
#define GS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gs_status {
  GS_OK = 0,
  GS_ERR_VALIDATION = 1,
  GS_ERR_UNSUPPORTED_ORDER = 2,
  GS_ERR_UNDEFINED_CORRELATION = 3,
  GS_ERR_INSUFFICIENT_DATA = 4,
  GS_ERR_INFEASIBLE = 5,
  GS_ERR_INCONSISTENT = 6,
  GS_ERR_SECTOR_MISMATCH = 7,
  GS_ERR_TRUNCATION = 8,
  GS_ERR_NUMERICAL = 9,
  GS_ERR_INTERNAL = 10
} gs_status;

/* Opaque run context: tolerance, Fock cutoff, seed, noise sigmas. */
typedef struct gs_context gs_context;

GS_API const char* gs_version(void);

/* config_json may be NULL for defaults. */
GS_API gs_status gs_context_new(const char* config_json, gs_context** out);
GS_API void gs_context_free(gs_context* ctx);
GS_API gs_status gs_context_config(const gs_context* ctx, char** out_json);

GS_API gs_status gs_simulate(const gs_context* ctx, const char* params_json, char** out_json);
GS_API gs_status gs_classify(const gs_context* ctx, const char* measurements_json, char** out_json);
/* sector: "auto", "nd", "ns" or "dst"; inputs are JSON documents. */
GS_API gs_status gs_reconstruct(const gs_context* ctx, const char* const* inputs, size_t n_inputs,
                                const char* sector, char** out_json);
GS_API gs_status gs_verify(const gs_context* ctx, const char* params_json, char** out_json);
GS_API gs_status gs_curves(const char* relation, double g2_from, double g2_to, int points, char** out_csv);
GS_API gs_status gs_bucket(const gs_context* ctx, const char* input_json, char** out_json);

/* Message of the last failed call on this thread ("" if none). */
GS_API const char* gs_last_error(void);
/* Process exit code for a status: 0 ok, 2 validation, 3 infeasible/inconsistent, 4 numerical. */
GS_API int gs_exit_code(gs_status status);
GS_API void gs_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
