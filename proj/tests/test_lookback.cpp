#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/lookback.hpp"
#include "core/synthgen.hpp"

using namespace tsforge;
using namespace tsforge::lookback;

namespace {

std::vector<std::int64_t> spaced(std::size_t n, std::int64_t step) {
  std::vector<std::int64_t> ts(n);
  for (std::size_t i = 0; i < n; ++i) ts[i] = static_cast<std::int64_t>(i) * step;
  return ts;
}

std::vector<double> sine(std::size_t n, double period, double level = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = level + std::sin(2 * M_PI * static_cast<double>(i) / period);
  }
  return v;
}

}  // namespace

TEST_CASE("frequency inference snaps within 5%") {
  CHECK(infer_frequency(spaced(10, 86400)).unit == FrequencyUnit::Day);
  CHECK(infer_frequency(spaced(10, 3600)).unit == FrequencyUnit::Hour);
  CHECK(infer_frequency(spaced(10, 60)).unit == FrequencyUnit::Minute);
  CHECK(infer_frequency(spaced(10, 604800)).unit == FrequencyUnit::Week);
  CHECK(infer_frequency(spaced(10, 86400 * 31)).unit == FrequencyUnit::Month);  // within 5% of 30d
  CHECK(infer_frequency(spaced(10, 5000)).unit == FrequencyUnit::Unknown);
  CHECK(infer_frequency(spaced(2, 60)).unit == FrequencyUnit::Unknown);  // too few points
  // jittered daily data still snaps via the median
  std::vector<std::int64_t> ts = spaced(11, 86400);
  ts[5] += 4000;
  CHECK(infer_frequency(ts).unit == FrequencyUnit::Day);
}

TEST_CASE("seasonal period table") {
  CHECK(seasonal_periods(FrequencyUnit::Second) ==
        std::vector<std::size_t>{60, 3600, 86400, 604800, 2592000, 31557600});
  CHECK(seasonal_periods(FrequencyUnit::Minute) ==
        std::vector<std::size_t>{60, 1440, 10080, 43200, 525960});
  CHECK(seasonal_periods(FrequencyUnit::Hour) == std::vector<std::size_t>{24, 168, 720, 8766});
  CHECK(seasonal_periods(FrequencyUnit::Day) == std::vector<std::size_t>{7, 30, 365});
  CHECK(seasonal_periods(FrequencyUnit::Week) == std::vector<std::size_t>{4, 52});
  CHECK(seasonal_periods(FrequencyUnit::Month) == std::vector<std::size_t>{12});
  CHECK(seasonal_periods(FrequencyUnit::Year).empty());
}

TEST_CASE("zero crossings estimate the half period") {
  const std::size_t gap = zero_crossing_lookback(sine(480, 24.0));
  CHECK(gap == 12);
  CHECK(zero_crossing_lookback({1.0, 2.0, 3.0, 4.0}) == 0);  // monotone, < 2 crossings
  CHECK(zero_crossing_lookback({1.0, 2.0}) == 0);
}

TEST_CASE("spectral peak finds the true period") {
  CHECK(spectral_lookback(sine(480, 24.0), 24) == 24);
  CHECK(spectral_lookback(sine(2000, 168.0), 168) == 168);
  CHECK(spectral_lookback(std::vector<double>(100, 3.0), 10) == 0);  // flat spectrum
  CHECK(spectral_lookback(sine(30, 24.0), 24) == 0);                 // window too small
}

TEST_CASE("influence ranking prefers the informative lag width") {
  // AR(1): one lag carries everything; lw=2 beats a wasteful lw=50
  Rng rng(23);
  std::vector<double> x{0.0};
  for (std::size_t t = 1; t < 1200; ++t) x.push_back(0.9 * x.back() + rng.next_normal() * 0.1);
  LookbackConfig cfg;
  cfg.seed = 5;
  InfluenceResult r = influence_rank(x, {2, 50}, cfg);
  REQUIRE(r.ordered.size() == 2);
  CHECK(r.ordered[0] == 2);
}

TEST_CASE("discover on a pure sine keeps the period family on top") {
  for (double p : {12.0, 24.0}) {
    TimeSeriesFrame f({sine(1200, p)}, {"s"}, std::nullopt);
    LookbackConfig cfg;
    LookbackRecommendation rec = discover(f, cfg);
    REQUIRE(!rec.candidates.empty());
    const std::size_t top = rec.candidates[0];
    const auto half = static_cast<std::size_t>(p / 2);
    CHECK((top == static_cast<std::size_t>(p) || top == half));
  }
}

TEST_CASE("discover falls back to the default") {
  TimeSeriesFrame constant({std::vector<double>(100, 5.0)}, {"c"}, std::nullopt);
  LookbackConfig cfg;
  LookbackRecommendation rec = discover(constant, cfg);
  CHECK(rec.candidates == std::vector<std::size_t>{8});
  CHECK(rec.provenance[0] == Provenance::Default);
}

TEST_CASE("discover respects max_look_back") {
  TimeSeriesFrame f({sine(1200, 24.0)}, {"s"}, std::nullopt);
  LookbackConfig cfg;
  cfg.max_look_back = 10;
  LookbackRecommendation rec = discover(f, cfg);
  for (std::size_t lw : rec.candidates) CHECK(lw <= 10);
}

TEST_CASE("multivariate union caps by dimensionality") {
  // three series with individual look-backs around 12; cap 9 forces 9/3 = 3
  std::vector<std::vector<double>> cols = {sine(1200, 24.0), sine(1200, 24.0), sine(1200, 24.0)};
  TimeSeriesFrame f(std::move(cols), {"a", "b", "c"}, std::nullopt);
  LookbackConfig cfg;
  cfg.max_look_back = 9;
  LookbackRecommendation rec = discover(f, cfg);
  REQUIRE(!rec.candidates.empty());
  for (std::size_t lw : rec.candidates) CHECK(lw * 3 <= 9);

  cfg.multivariate_ignore_violations = true;
  LookbackRecommendation rec2 = discover(f, cfg);
  // every per-series value violates the cap, so the default takes over
  CHECK(rec2.candidates == std::vector<std::size_t>{8});
}

TEST_CASE("multivariate candidates come out deduplicated and decreasing") {
  std::vector<std::vector<double>> cols = {sine(1200, 24.0), sine(1200, 48.0)};
  TimeSeriesFrame f(std::move(cols), {"a", "b"}, std::nullopt);
  LookbackConfig cfg;
  LookbackRecommendation rec = discover(f, cfg);
  REQUIRE(!rec.candidates.empty());
  for (std::size_t i = 1; i < rec.candidates.size(); ++i) {
    CHECK(rec.candidates[i - 1] > rec.candidates[i]);
  }
}
