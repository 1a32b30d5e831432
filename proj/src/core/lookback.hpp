#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frame.hpp"

namespace tsforge::lookback {

enum class FrequencyUnit { Unknown, Second, Minute, Hour, Day, Week, Month, Year };

struct Frequency {
  FrequencyUnit unit = FrequencyUnit::Unknown;
  std::int64_t seconds = 0;  // raw median delta when unsnappable
};

struct LookbackConfig {
  std::optional<std::size_t> max_look_back;
  std::size_t default_lookback = 8;
  std::size_t influence_sample_count = 800;
  std::uint64_t seed = 0;
  bool multivariate_ignore_violations = false;  // option 2 of the union rule
};

enum class Provenance { TimeIndex, ZeroCrossing, Spectral, Default };

struct LookbackRecommendation {
  std::vector<std::size_t> candidates;     // best first
  std::vector<Provenance> provenance;      // aligned with candidates
  std::vector<double> influence_ranks;     // aligned; 0 when ranking was skipped
};

// Median inter-timestamp delta snapped to the nearest canonical unit within
// 5% relative tolerance. Fewer than 3 timestamps → Unknown.
Frequency infer_frequency(const std::vector<std::int64_t>& timestamps);

// The Table-1 row for a canonical unit (non-integers rounded, 1 dropped).
std::vector<std::size_t> seasonal_periods(FrequencyUnit unit);

// Average gap between adjacent sign changes of the mean-adjusted series;
// 0 when fewer than 2 crossings exist.
std::size_t zero_crossing_lookback(const std::vector<double>& x);

// Periodogram peak over the most recent min(n, 8·season) samples; returns
// round(window/k) for the max-power Fourier index k ≥ 1, 0 for a flat
// spectrum.
std::size_t spectral_lookback(const std::vector<double>& x, std::size_t season);

// Orders candidates by average rank across two predictive-strength measures
// on sampled lag windows (full-regression F-statistic; negated MAE of a
// small tree ensemble). Ties broken by smaller lw. Returns the surviving
// candidates best-first plus their average ranks.
struct InfluenceResult {
  std::vector<std::size_t> ordered;
  std::vector<double> average_ranks;
};
InfluenceResult influence_rank(const std::vector<double>& x,
                               const std::vector<std::size_t>& candidates,
                               const LookbackConfig& cfg);

LookbackRecommendation discover(const TimeSeriesFrame& frame, const LookbackConfig& cfg);

std::string provenance_name(Provenance p);

}  // namespace tsforge::lookback
