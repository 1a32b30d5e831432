#include "tsforge.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "../core/engine.hpp"

using tsforge::TsError;

struct tsf_result {
  tsforge::engine::FitResult fit;
};

struct tsf_model {
  nlohmann::json model;
};

namespace {

thread_local std::string g_last_error = "";

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename F>
int guarded(F&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    return fail(TSF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const TsError& e) {
    return fail(TSF_ERR_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(TSF_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(TSF_ERR_RUNTIME, "unknown error");
  }
}

tsforge::engine::RunConfig parse_options(const char* options_json) {
  tsforge::engine::RunConfig cfg;
  if (!options_json || !*options_json) return cfg;
  const nlohmann::json j = nlohmann::json::parse(options_json);
  if (!j.is_object()) throw TsError("options must be a JSON object");
  if (j.contains("timestamp_column")) cfg.timestamp_column = j.at("timestamp_column");
  if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<std::size_t>();
  if (j.contains("holdout")) cfg.holdout_fraction = j.at("holdout").get<double>();
  if (j.contains("max_look_back")) cfg.max_look_back = j.at("max_look_back").get<std::size_t>();
  if (j.contains("lookback")) cfg.lookback_override = j.at("lookback").get<std::size_t>();
  if (j.contains("min_allocation")) cfg.min_allocation = j.at("min_allocation").get<std::size_t>();
  if (j.contains("allocation")) cfg.allocation = j.at("allocation").get<std::size_t>();
  if (j.contains("cutoff")) cfg.cutoff = j.at("cutoff").get<std::size_t>();
  if (j.contains("geo")) cfg.geo = j.at("geo").get<double>();
  if (j.contains("run_to_completion")) {
    cfg.run_to_completion = j.at("run_to_completion").get<std::size_t>();
  }
  if (j.contains("test_fraction")) cfg.tdaub_test_fraction = j.at("test_fraction").get<double>();
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

tsforge::tdaub::ProgressSink make_sink(tsf_progress_fn progress, void* user_data) {
  if (!progress) return {};
  return [progress, user_data](const tsforge::tdaub::ProgressEvent& ev) {
    progress(ev.phase.c_str(), ev.pipeline.c_str(), ev.allocation, ev.score, ev.elapsed_seconds,
             user_data);
  };
}

int do_fit(tsforge::TimeSeriesFrame frame, const char* options_json, tsf_progress_fn progress,
           void* user_data, tsf_result** out) {
  auto cfg = parse_options(options_json);
  auto result = std::make_unique<tsf_result>();
  result->fit = tsforge::engine::fit(frame, cfg, make_sink(progress, user_data));
  *out = result.release();
  return TSF_OK;
}

}  // namespace

extern "C" {

const char* tsf_last_error(void) { return g_last_error.c_str(); }

void tsf_string_free(char* s) { std::free(s); }

int tsf_fit_file(const char* csv_path, const char* options_json, tsf_progress_fn progress,
                 void* user_data, tsf_result** out) {
  if (!csv_path || !out) return fail(TSF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto cfg = parse_options(options_json);
    return do_fit(tsforge::load_csv(csv_path, cfg.timestamp_column), options_json, progress,
                  user_data, out);
  });
}

int tsf_fit_csv(const char* csv_text, const char* options_json, tsf_progress_fn progress,
                void* user_data, tsf_result** out) {
  if (!csv_text || !out) return fail(TSF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto cfg = parse_options(options_json);
    return do_fit(tsforge::parse_csv(csv_text, cfg.timestamp_column), options_json, progress,
                  user_data, out);
  });
}

int tsf_result_report_json(const tsf_result* result, char** out) {
  if (!result || !out) return fail(TSF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(result->fit.report.dump(2));
    return TSF_OK;
  });
}

int tsf_result_report_csv(const tsf_result* result, char** out) {
  if (!result || !out) return fail(TSF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(result->fit.report_csv);
    return TSF_OK;
  });
}

int tsf_result_model_json(const tsf_result* result, char** out) {
  if (!result || !out) return fail(TSF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(result->fit.model.dump(2));
    return TSF_OK;
  });
}

int tsf_result_winner_name(const tsf_result* result, char** out) {
  if (!result || !out) return fail(TSF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(result->fit.winner_name);
    return TSF_OK;
  });
}

double tsf_result_holdout_smape(const tsf_result* result) {
  if (!result) return -1.0;
  return result->fit.winner_holdout_smape;
}

void tsf_result_free(tsf_result* result) { delete result; }

int tsf_model_load_json(const char* model_json, tsf_model** out) {
  if (!model_json || !out) return fail(TSF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto model = std::make_unique<tsf_model>();
    model->model = nlohmann::json::parse(model_json);
    // Reject broken payloads now rather than at predict time.
    tsforge::engine::predict_from_model(model->model, std::nullopt);
    *out = model.release();
    return TSF_OK;
  });
}

int tsf_model_predict_csv(const tsf_model* model, size_t horizon, char** out) {
  if (!model || !out) return fail(TSF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::optional<std::size_t> h;
    if (horizon > 0) h = horizon;
    *out = dup_string(tsforge::engine::predict_csv(model->model, h));
    return TSF_OK;
  });
}

void tsf_model_free(tsf_model* model) { delete model; }

int tsf_bench(const char* const* csv_paths, size_t n_paths, const char* options_json,
              tsf_progress_fn progress, void* user_data, char** report_json, char** report_csv) {
  if (!csv_paths || n_paths == 0 || !report_json || !report_csv) {
    return fail(TSF_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    std::vector<std::string> paths(csv_paths, csv_paths + n_paths);
    auto cfg = parse_options(options_json);
    auto result = tsforge::engine::bench(paths, cfg, make_sink(progress, user_data));
    *report_json = dup_string(result.report.dump(2));
    *report_csv = dup_string(result.csv);
    return TSF_OK;
  });
}

int tsf_synth_corpus_csv(size_t length, uint64_t seed, char** out) {
  if (!out || length == 0) return fail(TSF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(tsforge::engine::synth_corpus_csv(length, seed));
    return TSF_OK;
  });
}

}  // extern "C"
