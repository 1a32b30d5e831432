#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "frame.hpp"
#include "lookback.hpp"
#include "pipeline.hpp"
#include "tdaub.hpp"

namespace tsforge::engine {

// Everything the fit flow needs; zeros and empty optionals mean "derive from
// the data" (min_allocation_size defaults to max(⌈L/20⌉, 10) with L the
// selector's training length, allocation_size follows it, cutoff is 5×
// allocation).
struct RunConfig {
  std::optional<std::string> timestamp_column;
  std::size_t horizon = 12;
  double holdout_fraction = 0.2;
  std::optional<std::size_t> max_look_back;
  std::optional<std::size_t> lookback_override;  // skips discovery entirely

  std::size_t min_allocation = 0;
  std::size_t allocation = 0;
  std::size_t cutoff = 0;
  double geo = 2.0;
  std::size_t run_to_completion = 1;
  double tdaub_test_fraction = 0.2;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FitResult {
  nlohmann::json report;  // schema 1, full evaluation record
  std::string report_csv;
  nlohmann::json model;  // persistable winner
  double winner_holdout_smape = 0.0;
  std::string winner_name;
};

// Quality check → holdout split → zero-model baseline → look-back discovery
// → catalog → selection → winner retrain → holdout evaluation.
FitResult fit(const TimeSeriesFrame& raw, const RunConfig& cfg,
              const tdaub::ProgressSink& sink = {});
FitResult fit_file(const std::string& path, const RunConfig& cfg,
                   const tdaub::ProgressSink& sink = {});

// Reloads a persisted model and forecasts h steps (the trained horizon when
// h is absent), returned as CSV in the original data scale.
Matrix predict_from_model(const nlohmann::json& model, std::optional<std::size_t> h);
std::string predict_csv(const nlohmann::json& model, std::optional<std::size_t> h);

struct BenchResult {
  nlohmann::json report;
  std::string csv;  // one row per dataset × pipeline plus a mean-rank summary
};

// Runs fit over each dataset; per-dataset failures are recorded and the run
// continues. Errors only when no dataset is given.
BenchResult bench(const std::vector<std::string>& csv_paths, const RunConfig& cfg,
                  const tdaub::ProgressSink& sink = {});

std::string synth_corpus_csv(std::size_t length = 2000, std::uint64_t seed = 7);

}  // namespace tsforge::engine
