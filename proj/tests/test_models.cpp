#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/forecasters.hpp"
#include "core/tree.hpp"

using namespace tsforge;

namespace {

TimeSeriesFrame column(std::vector<double> v, const std::string& name = "a") {
  return TimeSeriesFrame({std::move(v)}, {name}, std::nullopt);
}

}  // namespace

TEST_CASE("zero model repeats the last row") {
  TimeSeriesFrame f({{1, 2, 7}, {4, 5, 6}}, {"a", "b"}, std::nullopt);
  ZeroModel m;
  m.fit(f, 3);
  Matrix p = m.predict();
  REQUIRE(p.rows() == 3);
  REQUIRE(p.cols() == 2);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(p(r, 0) == 7.0);
    CHECK(p(r, 1) == 6.0);
  }
  CHECK_THROWS_AS(ZeroModel().predict(1), TsError);  // predict before fit
}

TEST_CASE("holt-winters additive tracks trend plus season") {
  // 10 + 0.5*t + season[1,-1,2,-2], m=4; the continuation is analytic
  const std::vector<double> season = {1, -1, 2, -2};
  std::vector<double> v;
  for (std::size_t t = 0; t < 48; ++t) {
    v.push_back(10 + 0.5 * static_cast<double>(t) + season[t % 4]);
  }
  HoltWinters m(4, HwMode::Additive);
  m.fit(column(v), 8);
  Matrix p = m.predict();
  for (std::size_t k = 0; k < 8; ++k) {
    const std::size_t t = 48 + k;
    const double want = 10 + 0.5 * static_cast<double>(t) + season[t % 4];
    CHECK(p(k, 0) == doctest::Approx(want).epsilon(0.02));
  }
}

TEST_CASE("holt-winters multiplicative on a ratio-seasonal series") {
  const std::vector<double> ratio = {1.2, 0.8, 1.1, 0.9};
  std::vector<double> v;
  for (std::size_t t = 0; t < 48; ++t) {
    v.push_back((20 + 0.5 * static_cast<double>(t)) * ratio[t % 4]);
  }
  HoltWinters m(4, HwMode::Multiplicative);
  m.fit(column(v), 4);
  Matrix p = m.predict();
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t t = 48 + k;
    const double want = (20 + 0.5 * static_cast<double>(t)) * ratio[t % 4];
    CHECK(p(k, 0) == doctest::Approx(want).epsilon(0.05));
  }
}

TEST_CASE("holt-winters needs two full seasons") {
  HoltWinters m(12, HwMode::Additive);
  CHECK_THROWS_AS(m.fit(column({1, 2, 3, 4, 5}), 2), TsError);
}

TEST_CASE("ar recovers an ar(1) coefficient") {
  Rng rng(17);
  std::vector<double> v{0.0};
  for (std::size_t t = 1; t < 800; ++t) {
    v.push_back(0.8 * v.back() + rng.next_normal() * 0.1);
  }
  ARParams p = ar_fit(v, 6);
  REQUIRE(p.order >= 1);
  CHECK(p.coefficients[0] == doctest::Approx(0.8).epsilon(0.1));
}

TEST_CASE("ar is exact on a noiseless sinusoid") {
  std::vector<double> v;
  for (std::size_t t = 0; t < 200; ++t) v.push_back(std::sin(2 * M_PI * t / 20.0));
  ARParams p = ar_fit(v, 8);
  std::vector<double> f = ar_forecast(p, 10);
  for (std::size_t k = 0; k < 10; ++k) {
    const double want = std::sin(2 * M_PI * (200.0 + k) / 20.0);
    CHECK(f[k] == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("arlite clamps the maximum order on short data") {
  ArLite m(12);
  CHECK_NOTHROW(m.fit(column({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), 2));
  CHECK(m.params()[0].order * 2 + 2 < 10);
}

TEST_CASE("mt2r picks the quadratic when warranted") {
  std::vector<double> lin, quad;
  for (std::size_t t = 0; t < 100; ++t) {
    const double x = static_cast<double>(t);
    lin.push_back(3 + 0.5 * x);
    quad.push_back(3 + 0.5 * x + 0.02 * x * x);
  }
  PolyTrend a = mt2r_fit_column(lin);
  PolyTrend b = mt2r_fit_column(quad);
  CHECK(a.degree == 1);
  CHECK(b.degree == 2);

  Mt2r m;
  m.fit(column(quad), 5);
  Matrix p = m.predict();
  for (std::size_t k = 0; k < 5; ++k) {
    const double x = static_cast<double>(100 + k);
    CHECK(p(k, 0) == doctest::Approx(3 + 0.5 * x + 0.02 * x * x).epsilon(1e-3));
  }
}

TEST_CASE("ridge window learner recovers y = 2*x1 within 1e-6") {
  Rng rng(5);
  Matrix x(200, 1), y(200, 1);
  for (std::size_t i = 0; i < 200; ++i) {
    x(i, 0) = rng.next_double() * 10.0;
    y(i, 0) = 2.0 * x(i, 0);
  }
  FittedWindowLearner fit = window_regressor_fit(x, y, WindowLearner::Ridge);
  CHECK(fit.ridge_weights(0, 0) == doctest::Approx(2.0).epsilon(1e-6));
  const auto pred = fit.predict_row({4.0});
  CHECK(pred[0] == doctest::Approx(8.0).epsilon(1e-5));
}

TEST_CASE("tree ensemble is seed-deterministic and nails constants") {
  Rng rng(9);
  Matrix x(120, 3), y(120, 2);
  for (std::size_t i = 0; i < 120; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.next_double();
    y(i, 0) = x(i, 0) > 0.5 ? 1.0 : -1.0;
    y(i, 1) = 4.0;
  }
  TreeEnsemble a, b;
  TreeEnsemble::Params params;
  params.seed = 42;
  a.fit(x, y, params);
  b.fit(x, y, params);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto pa = a.predict_row(x.row(i));
    const auto pb = b.predict_row(x.row(i));
    CHECK(pa[0] == pb[0]);
    CHECK(pa[1] == doctest::Approx(4.0).epsilon(1e-9));
  }

  // serialization keeps predictions bit-identical
  TreeEnsemble c;
  c.load(a.to_json());
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(a.predict_row(x.row(i))[0] == c.predict_row(x.row(i))[0]);
  }
}

TEST_CASE("window regressor extrapolates a linear series") {
  std::vector<double> v;
  for (std::size_t t = 0; t < 100; ++t) v.push_back(5.0 + 2.0 * static_cast<double>(t));
  WindowRegressor m(FlattenVariant::Localized, 6, WindowLearner::Ridge);
  m.fit(column(v), 4);
  Matrix p = m.predict();
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(p(k, 0) == doctest::Approx(5.0 + 2.0 * (100.0 + k)).epsilon(1e-6));
  }

  // horizons past the trained width extend recursively and stay on the line
  Matrix far = m.predict(10);
  REQUIRE(far.rows() == 10);
  CHECK(far(9, 0) == doctest::Approx(5.0 + 2.0 * 109.0).epsilon(1e-4));
}

TEST_CASE("estimators round trip through json") {
  std::vector<double> v;
  for (std::size_t t = 0; t < 60; ++t) {
    v.push_back(10 + 0.3 * static_cast<double>(t) + std::sin(2 * M_PI * t / 6.0));
  }
  TimeSeriesFrame f = column(v);

  std::vector<std::unique_ptr<Estimator>> models;
  models.push_back(std::make_unique<ZeroModel>());
  models.push_back(std::make_unique<HoltWinters>(6, HwMode::Additive));
  models.push_back(std::make_unique<ArLite>());
  models.push_back(std::make_unique<Mt2r>());
  models.push_back(std::make_unique<WindowRegressor>(FlattenVariant::Plain, 6,
                                                     WindowLearner::TreeEnsemble, 3));

  for (auto& m : models) {
    m->fit(f, 5);
    auto loaded = estimator_from_json(m->to_json());
    Matrix a = m->predict();
    Matrix b = loaded->predict(5);
    REQUIRE(b.rows() == 5);
    for (std::size_t r = 0; r < 5; ++r) {
      CHECK(a(r, 0) == doctest::Approx(b(r, 0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("multivariate estimators keep the h-by-d contract") {
  TimeSeriesFrame f({{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {2, 4, 6, 8, 10, 12, 14, 16, 18, 20}},
                    {"a", "b"}, std::nullopt);
  for (auto* m : {static_cast<Estimator*>(new ZeroModel()), static_cast<Estimator*>(new ArLite()),
                  static_cast<Estimator*>(new Mt2r())}) {
    m->fit(f, 3);
    Matrix p = m->predict();
    CHECK(p.rows() == 3);
    CHECK(p.cols() == 2);
    delete m;
  }
}
