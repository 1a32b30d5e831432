#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "frame.hpp"
#include "pipeline.hpp"

namespace tsforge::tdaub {

// Algorithm parameters. fixed_allocation_cutoff of 0 means the default,
// 5 times allocation_size.
struct TDaubConfig {
  std::size_t min_allocation_size = 10;
  std::size_t allocation_size = 10;
  std::size_t fixed_allocation_cutoff = 0;
  double geo_increment_size = 2.0;
  std::size_t run_to_completion = 1;
  double test_fraction = 0.2;  // T1/T2 split inside the training frame
  std::size_t horizon = 12;
  std::size_t jobs = 1;

  std::size_t cutoff() const {
    return fixed_allocation_cutoff > 0 ? fixed_allocation_cutoff : 5 * allocation_size;
  }
  void validate() const;
};

struct ScoreEntry {
  std::size_t allocation = 0;
  double score = kSentinelScore;
  double train_seconds = 0.0;
  double score_seconds = 0.0;
  bool failed = false;
};

struct PipelineBoard {
  std::string name;
  std::vector<ScoreEntry> history;  // allocations strictly increasing
  double extrapolated = kSentinelScore;
  std::optional<double> final_score;  // full-T1 score, scoring phase only
};

struct Scoreboard {
  std::vector<PipelineBoard> pipelines;  // catalog order
  std::size_t L = 0;                     // length of T1
  std::vector<std::size_t> ranking;      // indices best-first by extrapolated score
  bool bypassed = false;
  std::size_t suffix_violations = 0;  // reverse-allocation instrumentation
  std::size_t rows_trained = 0;       // allocation budget accounting
};

struct ProgressEvent {
  std::string phase;  // "fixed", "acceleration", "scoring", "bypass", "retrain"
  std::string pipeline;
  std::size_t allocation = 0;
  double score = 0.0;
  double elapsed_seconds = 0.0;
};
using ProgressSink = std::function<void(const ProgressEvent&)>;

// [min·1, …, min·num_fix_runs] with num_fix_runs = int(cutoff / min), each
// entry clamped to L, duplicates from clamping removed.
std::vector<std::size_t> plan_fixed_allocations(const TDaubConfig& cfg, std::size_t L);

// int(last_allocation_size · geo_increment_size / allocation_size) · allocation_size
std::size_t next_allocation(std::size_t last_allocation_size, const TDaubConfig& cfg);

// OLS of score against allocation evaluated at length L, clamped to
// [0, 200]. Fewer than two points or zero allocation variance fall back to
// the last observed score.
double extrapolate(const std::vector<ScoreEntry>& history, std::size_t L);

struct SelectionResult {
  std::unique_ptr<Pipeline> winner;        // retrained on the entire train frame
  std::size_t winner_index = 0;            // catalog index
  std::vector<std::size_t> final_ranking;  // catalog indices best-first
  double winner_t2_score = kSentinelScore;
  Scoreboard board;
};

// Full Algorithm 1 run over the catalog: T1/T2 split, fixed allocations in
// catalog order (parallel across cfg.jobs workers, worker-count independent),
// learning-curve extrapolation and ranking, sequential geometric
// acceleration of the current top pipeline, full-T1 scoring of the top
// run_to_completion pipelines plus any pipeline whose extrapolation beats
// the best verified score, winner retrained on all of train. When
// length(T1) ≤ min_allocation_size the ladder is skipped and every pipeline
// is ranked on full T1 directly.
SelectionResult select(const std::vector<std::unique_ptr<Pipeline>>& pipelines,
                       const TimeSeriesFrame& train, const TDaubConfig& cfg,
                       const ProgressSink& sink = {});

}  // namespace tsforge::tdaub
