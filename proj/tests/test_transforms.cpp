#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/transforms.hpp"

using namespace tsforge;

namespace {

TimeSeriesFrame random_positive_frame(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<std::vector<double>> cols(d);
  for (auto& c : cols) {
    c.resize(n);
    for (auto& v : c) v = 0.1 + rng.next_double() * 10.0;
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < d; ++c) names.push_back("c" + std::to_string(c));
  return TimeSeriesFrame(std::move(cols), std::move(names), std::nullopt);
}

double max_diff(const TimeSeriesFrame& a, const TimeSeriesFrame& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      m = std::max(m, std::abs(a.value(r, c) - b.value(r, c)));
    }
  }
  return m;
}

}  // namespace

TEST_CASE("log transform round trip and positivity guard") {
  Rng rng(1);
  TimeSeriesFrame f = random_positive_frame(rng, 40, 2);
  LogTransform t;
  TimeSeriesFrame g = t.fit_transform(f);
  CHECK(g.value(0, 0) == doctest::Approx(std::log(f.value(0, 0))));
  CHECK(max_diff(t.inverse(g), f) < 1e-12);

  TimeSeriesFrame bad({{1.0, -1.0, 2.0}}, {"a"}, std::nullopt);
  LogTransform t2;
  CHECK_THROWS_AS(t2.fit_transform(bad), TsError);
}

TEST_CASE("box-cox lambda comes from the grid and inverts") {
  Rng rng(2);
  TimeSeriesFrame f = random_positive_frame(rng, 80, 1);
  BoxCoxTransform t;
  TimeSeriesFrame g = t.fit_transform(f);
  REQUIRE(t.lambdas().size() == 1);
  const double l = t.lambdas()[0];
  bool on_grid = false;
  for (double cand = -2.0; cand <= 2.01; cand += 0.5) {
    if (std::abs(cand - l) < 1e-12) on_grid = true;
  }
  CHECK(on_grid);
  CHECK(max_diff(t.inverse(g), f) < 1e-9);
}

TEST_CASE("fisher transform inverts inside its clamp range") {
  Rng rng(3);
  TimeSeriesFrame f = random_positive_frame(rng, 60, 2);
  FisherTransform t;
  TimeSeriesFrame g = t.fit_transform(f);
  CHECK(max_diff(t.inverse(g), f) < 1e-9);
}

TEST_CASE("difference transform stores anchors and reconstructs") {
  TimeSeriesFrame f({{5.0, 7.0, 4.0, 9.0}}, {"a"}, std::nullopt);
  DifferenceTransform t;
  TimeSeriesFrame g = t.fit_transform(f);
  REQUIRE(g.rows() == 3);
  CHECK(g.value(0, 0) == 2.0);
  CHECK(g.value(1, 0) == -3.0);
  CHECK(g.value(2, 0) == 5.0);
  CHECK(max_diff(t.inverse(g), f) < 1e-12);

  // forecast continuation cumulates from the last observed value (9)
  Matrix pred(2, 1);
  pred(0, 0) = 1.0;
  pred(1, 0) = -2.0;
  Matrix undone = t.inverse_forecast(pred);
  CHECK(undone(0, 0) == doctest::Approx(10.0));
  CHECK(undone(1, 0) == doctest::Approx(8.0));
}

TEST_CASE("chain inverse runs in reverse order") {
  // log then difference: inverting must un-difference first, then exp
  Rng rng(4);
  TimeSeriesFrame f = random_positive_frame(rng, 30, 2);
  TransformChain chain;
  chain.push_back(make_transformer("log"));
  chain.push_back(make_transformer("difference"));
  TimeSeriesFrame g = chain.fit_transform(f);
  CHECK(g.rows() == f.rows() - 1);
  CHECK(max_diff(chain.inverse(g), f) < 1e-9);
}

TEST_CASE("every stateless+difference chain round-trips") {
  Rng rng(5);
  for (const char* stateless : {"log", "box_cox", "fisher"}) {
    for (int rep = 0; rep < 20; ++rep) {
      TimeSeriesFrame f = random_positive_frame(rng, 25, 1);
      TransformChain chain;
      chain.push_back(make_transformer(stateless));
      chain.push_back(make_transformer("difference"));
      TimeSeriesFrame g = chain.fit_transform(f);
      CHECK(max_diff(chain.inverse(g), f) < 1e-9);
    }
  }
}

TEST_CASE("chain json round trip preserves forecast inversion") {
  Rng rng(6);
  TimeSeriesFrame f = random_positive_frame(rng, 30, 1);
  TransformChain chain;
  chain.push_back(make_transformer("log"));
  chain.push_back(make_transformer("difference"));
  chain.fit_transform(f);

  TransformChain loaded = TransformChain::from_json(chain.to_json());
  Matrix pred(3, 1);
  pred(0, 0) = 0.1;
  pred(1, 0) = -0.05;
  pred(2, 0) = 0.2;
  Matrix a = chain.inverse_forecast(pred);
  Matrix b = loaded.inverse_forecast(pred);
  for (std::size_t r = 0; r < a.rows(); ++r) CHECK(a(r, 0) == doctest::Approx(b(r, 0)));
}

TEST_CASE("unknown transformer name is rejected") {
  CHECK_THROWS_AS(make_transformer("warp"), TsError);
}

TEST_CASE("flatten enumerates windows exactly") {
  // two series, n=5, lw=2, h=1: rows = 5-2-1+1 = 3
  TimeSeriesFrame f({{1, 2, 3, 4, 5}, {10, 20, 30, 40, 50}}, {"a", "b"}, std::nullopt);
  WindowedDataset w = flatten(f, 2, 1, FlattenVariant::Plain);
  REQUIRE(w.x.rows() == 3);
  REQUIRE(w.x.cols() == 4);  // lw*d
  REQUIRE(w.y.cols() == 2);  // h*d
  // row 0: series a lags [1,2], series b lags [10,20]; targets a=3, b=30
  CHECK(w.x(0, 0) == 1.0);
  CHECK(w.x(0, 1) == 2.0);
  CHECK(w.x(0, 2) == 10.0);
  CHECK(w.x(0, 3) == 20.0);
  CHECK(w.y(0, 0) == 3.0);
  CHECK(w.y(0, 1) == 30.0);
  CHECK(w.x(2, 0) == 3.0);
  CHECK(w.y(2, 0) == 5.0);
}

TEST_CASE("localized flatten subtracts the window's last value") {
  TimeSeriesFrame f({{1, 2, 3, 4, 5}}, {"a"}, std::nullopt);
  WindowedDataset w = flatten(f, 2, 1, FlattenVariant::Localized);
  // window [1,2] -> [-1,0], target 3 -> 1, offset 2
  CHECK(w.x(0, 0) == -1.0);
  CHECK(w.x(0, 1) == 0.0);
  CHECK(w.y(0, 0) == 1.0);
  CHECK(w.offsets(0, 0) == 2.0);
}

TEST_CASE("normalized flatten z-scores each window") {
  TimeSeriesFrame f({{2, 4, 6, 8}}, {"a"}, std::nullopt);
  WindowedDataset w = flatten(f, 2, 1, FlattenVariant::Normalized);
  // window [2,4]: mean 3, stdev 1 -> [-1, 1]
  CHECK(w.x(0, 0) == doctest::Approx(-1.0));
  CHECK(w.x(0, 1) == doctest::Approx(1.0));
  CHECK(w.y(0, 0) == doctest::Approx(3.0));  // (6-3)/1
}

TEST_CASE("flatten rejects impossible geometry") {
  TimeSeriesFrame f({{1, 2, 3}}, {"a"}, std::nullopt);
  CHECK_THROWS_AS(flatten(f, 3, 1, FlattenVariant::Plain), TsError);
}

TEST_CASE("condition and decondition are inverse") {
  std::vector<std::vector<double>> window = {{3.0, 5.0, 7.0}};
  for (auto variant :
       {FlattenVariant::Plain, FlattenVariant::Localized, FlattenVariant::Normalized}) {
    ConditionedWindow cw = condition_window(window, variant);
    // a "prediction" equal to the conditioned continuation of the raw values
    std::vector<double> raw_targets = {9.0, 11.0};
    std::vector<double> conditioned(raw_targets.size());
    for (std::size_t i = 0; i < raw_targets.size(); ++i) {
      conditioned[i] = (raw_targets[i] - cw.offsets[0]) / cw.scales[0];
    }
    Matrix undone = decondition_targets(conditioned, 2, 1, cw);
    CHECK(undone(0, 0) == doctest::Approx(9.0));
    CHECK(undone(1, 0) == doctest::Approx(11.0));
  }
}
