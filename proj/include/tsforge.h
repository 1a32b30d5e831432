/* C interface to the forecasting engine. All functions returning int use the
 * TSF_* error codes; on failure tsf_last_error() describes what went wrong
 * for the calling thread. Strings handed out through char** parameters are
 * heap-allocated and must be released with tsf_string_free(). */
#ifndef TSFORGE_H
#define TSFORGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define TSF_OK 0
#define TSF_ERR_INVALID_ARGUMENT 1
#define TSF_ERR_IO 2
#define TSF_ERR_DATA 3
#define TSF_ERR_RUNTIME 4

typedef struct tsf_result tsf_result;
typedef struct tsf_model tsf_model;

/* Progress callback, invoked during selection. phase is one of "fixed",
 * "acceleration", "scoring", "bypass", "retrain". */
typedef void (*tsf_progress_fn)(const char* phase, const char* pipeline, size_t allocation,
                                double score, double elapsed_seconds, void* user_data);

/* Message for the most recent failure on this thread; never NULL. */
const char* tsf_last_error(void);

void tsf_string_free(char* s);

/* options_json is a JSON object; absent keys take their defaults. Keys:
 *   timestamp_column (string), horizon (int, default 12),
 *   holdout (fraction, default 0.2), max_look_back (int),
 *   lookback (int, skips discovery), min_allocation (int), allocation (int),
 *   cutoff (int), geo (real, default 2), run_to_completion (int, default 1),
 *   test_fraction (selector split, default 0.2), jobs (int, default 1),
 *   seed (int, default 0).
 * NULL or "" means all defaults. progress may be NULL. */
int tsf_fit_file(const char* csv_path, const char* options_json, tsf_progress_fn progress,
                 void* user_data, tsf_result** out);
int tsf_fit_csv(const char* csv_text, const char* options_json, tsf_progress_fn progress,
                void* user_data, tsf_result** out);

int tsf_result_report_json(const tsf_result* result, char** out);
int tsf_result_report_csv(const tsf_result* result, char** out);
int tsf_result_model_json(const tsf_result* result, char** out);
int tsf_result_winner_name(const tsf_result* result, char** out);
/* Winner SMAPE on the holdout segment; negative on invalid handle. */
double tsf_result_holdout_smape(const tsf_result* result);
void tsf_result_free(tsf_result* result);

int tsf_model_load_json(const char* model_json, tsf_model** out);
/* horizon 0 forecasts the trained width. Output is CSV with a header row. */
int tsf_model_predict_csv(const tsf_model* model, size_t horizon, char** out);
void tsf_model_free(tsf_model* model);

int tsf_bench(const char* const* csv_paths, size_t n_paths, const char* options_json,
              tsf_progress_fn progress, void* user_data, char** report_json, char** report_csv);

int tsf_synth_corpus_csv(size_t length, uint64_t seed, char** out);

#ifdef __cplusplus
}
#endif

#endif /* TSFORGE_H */
