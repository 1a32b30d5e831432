#include "forecasters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tsforge {

namespace {

const std::vector<double>& hw_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g{0.01};
    for (int i = 1; i <= 19; ++i) g.push_back(0.05 * i);
    return g;
  }();
  return grid;
}

double column_mean(const std::vector<double>& x, std::size_t begin, std::size_t count) {
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += x[begin + i];
  return s / static_cast<double>(count);
}

}  // namespace

// ---------------------------------------------------------------- zero model

Matrix zero_model_predict(const TimeSeriesFrame& train, std::size_t horizon) {
  if (horizon < 1) throw TsError("zero_model: horizon must be positive");
  const std::size_t d = train.cols();
  Matrix out(horizon, d);
  for (std::size_t c = 0; c < d; ++c) {
    const double last = train.column(c).back();
    for (std::size_t r = 0; r < horizon; ++r) out(r, c) = last;
  }
  return out;
}

void ZeroModel::fit(const TimeSeriesFrame& train, std::size_t horizon) {
  base_fit(horizon, train.cols());
  last_row_.resize(train.cols());
  for (std::size_t c = 0; c < train.cols(); ++c) last_row_[c] = train.column(c).back();
}

Matrix ZeroModel::predict(std::size_t horizon) const {
  require_fitted();
  if (horizon < 1) throw TsError("zero_model: horizon must be positive");
  Matrix out(horizon, d_);
  for (std::size_t r = 0; r < horizon; ++r) {
    for (std::size_t c = 0; c < d_; ++c) out(r, c) = last_row_[c];
  }
  return out;
}

nlohmann::json ZeroModel::to_json() const {
  nlohmann::json j = base_json();
  j["last_row"] = last_row_;
  return j;
}

void ZeroModel::load(const nlohmann::json& j) {
  base_load(j);
  last_row_ = j.at("last_row").get<std::vector<double>>();
}

// ---------------------------------------------------------------- Holt-Winters

namespace {

// One-step-ahead SSE of a full smoothing pass; fills final state into p.
double hw_run(const std::vector<double>& x, std::size_t m, HwMode mode, double alpha,
              double beta, double gamma, HoltWintersParams* out_state) {
  const std::size_t n = x.size();
  const double mean1 = column_mean(x, 0, m);
  const double mean2 = column_mean(x, m, m);
  double level = mean1;
  double trend = (mean2 - mean1) / static_cast<double>(m);
  std::vector<double> seasonal(n);
  for (std::size_t i = 0; i < m; ++i) {
    seasonal[i] = mode == HwMode::Additive ? x[i] - mean1 : x[i] / mean1;
  }
  double sse = 0.0;
  for (std::size_t t = m; t < n; ++t) {
    const double s_prev = seasonal[t - m];
    const double base = level + trend;
    const double pred = mode == HwMode::Additive ? base + s_prev : base * s_prev;
    const double err = x[t] - pred;
    sse += err * err;
    double new_level, new_season;
    if (mode == HwMode::Additive) {
      new_level = alpha * (x[t] - s_prev) + (1.0 - alpha) * base;
      new_season = gamma * (x[t] - new_level) + (1.0 - gamma) * s_prev;
    } else {
      new_level = alpha * (x[t] / s_prev) + (1.0 - alpha) * base;
      new_season = gamma * (x[t] / new_level) + (1.0 - gamma) * s_prev;
    }
    trend = beta * (new_level - level) + (1.0 - beta) * trend;
    level = new_level;
    seasonal[t] = new_season;
  }
  if (out_state) {
    out_state->level = level;
    out_state->trend = trend;
    out_state->seasonal.assign(seasonal.end() - static_cast<std::ptrdiff_t>(m), seasonal.end());
    out_state->in_sample_sse = sse;
  }
  return sse;
}

}  // namespace

HoltWintersParams holt_winters_fit(const std::vector<double>& x, std::size_t season_length,
                                   HwMode mode) {
  const std::size_t m = season_length;
  if (m < 1) throw TsError("holt_winters: season length must be positive");
  if (x.size() < 2 * m) throw TsError("holt_winters: need at least two seasons of data");
  if (mode == HwMode::Multiplicative) {
    for (double v : x) {
      if (!(v > 0.0)) throw TsError("holt_winters: multiplicative mode requires positive data");
    }
  }
  HoltWintersParams best;
  best.season_length = m;
  best.mode = mode;
  double best_sse = std::numeric_limits<double>::infinity();
  for (double alpha : hw_grid()) {
    for (double beta : hw_grid()) {
      for (double gamma : hw_grid()) {
        const double sse = hw_run(x, m, mode, alpha, beta, gamma, nullptr);
        if (sse < best_sse) {
          best_sse = sse;
          best.alpha = alpha;
          best.beta = beta;
          best.gamma = gamma;
        }
      }
    }
  }
  hw_run(x, m, mode, best.alpha, best.beta, best.gamma, &best);
  return best;
}

std::vector<double> holt_winters_forecast(const HoltWintersParams& p, std::size_t horizon) {
  std::vector<double> out(horizon);
  const std::size_t m = p.season_length;
  for (std::size_t k = 1; k <= horizon; ++k) {
    const double base = p.level + static_cast<double>(k) * p.trend;
    const double s = p.seasonal[(k - 1) % m];
    out[k - 1] = p.mode == HwMode::Additive ? base + s : base * s;
  }
  return out;
}

void HoltWinters::fit(const TimeSeriesFrame& train, std::size_t horizon) {
  per_column_.clear();
  for (std::size_t c = 0; c < train.cols(); ++c) {
    per_column_.push_back(holt_winters_fit(train.column(c), season_length_, mode_));
  }
  base_fit(horizon, train.cols());
}

Matrix HoltWinters::predict(std::size_t horizon) const {
  require_fitted();
  Matrix out(horizon, d_);
  for (std::size_t c = 0; c < d_; ++c) {
    const std::vector<double> f = holt_winters_forecast(per_column_[c], horizon);
    for (std::size_t r = 0; r < horizon; ++r) out(r, c) = f[r];
  }
  return out;
}

nlohmann::json HoltWinters::to_json() const {
  nlohmann::json j = base_json();
  j["season_length"] = season_length_;
  j["mode"] = mode_ == HwMode::Additive ? "additive" : "multiplicative";
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& p : per_column_) {
    cols.push_back({{"alpha", p.alpha},
                    {"beta", p.beta},
                    {"gamma", p.gamma},
                    {"level", p.level},
                    {"trend", p.trend},
                    {"seasonal", p.seasonal}});
  }
  j["columns_state"] = cols;
  return j;
}

void HoltWinters::load(const nlohmann::json& j) {
  base_load(j);
  season_length_ = j.at("season_length").get<std::size_t>();
  mode_ = j.at("mode").get<std::string>() == "additive" ? HwMode::Additive
                                                        : HwMode::Multiplicative;
  per_column_.clear();
  for (const auto& jc : j.at("columns_state")) {
    HoltWintersParams p;
    p.alpha = jc.at("alpha").get<double>();
    p.beta = jc.at("beta").get<double>();
    p.gamma = jc.at("gamma").get<double>();
    p.level = jc.at("level").get<double>();
    p.trend = jc.at("trend").get<double>();
    p.seasonal = jc.at("seasonal").get<std::vector<double>>();
    p.season_length = season_length_;
    p.mode = mode_;
    per_column_.push_back(std::move(p));
  }
}

// ---------------------------------------------------------------- AR

ARParams ar_fit(const std::vector<double>& x, std::size_t max_p) {
  const std::size_t n = x.size();
  if (max_p < 1) throw TsError("ar_fit: max_p must be positive");
  if (n <= 2 * max_p + 2) throw TsError("ar_fit: series too short for max_p");

  ARParams best;
  double best_aic = std::numeric_limits<double>::infinity();
  for (std::size_t p = 1; p <= max_p; ++p) {
    const std::size_t rows = n - p;
    Matrix design(rows, p + 1);
    Matrix target(rows, 1);
    for (std::size_t i = 0; i < rows; ++i) {
      design(i, 0) = 1.0;
      for (std::size_t k = 0; k < p; ++k) design(i, k + 1) = x[i + p - 1 - k];
      target(i, 0) = x[i + p];
    }
    Matrix w;
    bool fallback = false;
    try {
      w = ridge_solve(design, target, 0.0);
    } catch (const TsError&) {
      w = ridge_solve(design, target, 1e-6);
      fallback = true;
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      double pred = w(0, 0);
      for (std::size_t k = 0; k < p; ++k) pred += w(k + 1, 0) * design(i, k + 1);
      const double err = target(i, 0) - pred;
      sse += err * err;
    }
    const double nd = static_cast<double>(rows);
    const double aic = nd * std::log(std::max(sse / nd, 1e-300)) +
                       2.0 * (static_cast<double>(p) + 1.0);
    if (aic < best_aic) {
      best_aic = aic;
      best.order = p;
      best.intercept = w(0, 0);
      best.coefficients.assign(p, 0.0);
      for (std::size_t k = 0; k < p; ++k) best.coefficients[k] = w(k + 1, 0);
      best.used_ridge_fallback = fallback;
      best.aic = aic;
    }
  }
  best.recent.assign(x.end() - static_cast<std::ptrdiff_t>(best.order), x.end());
  return best;
}

std::vector<double> ar_forecast(const ARParams& p, std::size_t horizon) {
  std::vector<double> hist = p.recent;  // oldest first
  std::vector<double> out(horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    double v = p.intercept;
    for (std::size_t j = 0; j < p.order; ++j) {
      v += p.coefficients[j] * hist[hist.size() - 1 - j];  // coefficient j = lag j+1
    }
    out[k] = v;
    hist.push_back(v);
  }
  return out;
}

void ArLite::fit(const TimeSeriesFrame& train, std::size_t horizon) {
  const std::size_t n = train.rows();
  // Clamp the order cap so the fit precondition holds on short allocations.
  std::size_t max_p = max_p_;
  while (max_p > 1 && n <= 2 * max_p + 2) --max_p;
  per_column_.clear();
  for (std::size_t c = 0; c < train.cols(); ++c) {
    per_column_.push_back(ar_fit(train.column(c), max_p));
  }
  base_fit(horizon, train.cols());
}

Matrix ArLite::predict(std::size_t horizon) const {
  require_fitted();
  Matrix out(horizon, d_);
  for (std::size_t c = 0; c < d_; ++c) {
    const std::vector<double> f = ar_forecast(per_column_[c], horizon);
    for (std::size_t r = 0; r < horizon; ++r) out(r, c) = f[r];
  }
  return out;
}

nlohmann::json ArLite::to_json() const {
  nlohmann::json j = base_json();
  j["max_p"] = max_p_;
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& p : per_column_) {
    cols.push_back({{"order", p.order},
                    {"coefficients", p.coefficients},
                    {"intercept", p.intercept},
                    {"ridge_fallback", p.used_ridge_fallback},
                    {"recent", p.recent}});
  }
  j["columns_state"] = cols;
  return j;
}

void ArLite::load(const nlohmann::json& j) {
  base_load(j);
  max_p_ = j.at("max_p").get<std::size_t>();
  per_column_.clear();
  for (const auto& jc : j.at("columns_state")) {
    ARParams p;
    p.order = jc.at("order").get<std::size_t>();
    p.coefficients = jc.at("coefficients").get<std::vector<double>>();
    p.intercept = jc.at("intercept").get<double>();
    p.used_ridge_fallback = jc.at("ridge_fallback").get<bool>();
    p.recent = jc.at("recent").get<std::vector<double>>();
    per_column_.push_back(std::move(p));
  }
}

// ---------------------------------------------------------------- MT2R

namespace {

// Least-squares polynomial of τ = t/n_scale on rows [0, count).
std::vector<double> poly_fit(const std::vector<double>& x, std::size_t count,
                             std::size_t degree, std::size_t n_scale) {
  Matrix design(count, degree + 1);
  Matrix target(count, 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double tau = static_cast<double>(i) / static_cast<double>(n_scale);
    double pow_t = 1.0;
    for (std::size_t k = 0; k <= degree; ++k) {
      design(i, k) = pow_t;
      pow_t *= tau;
    }
    target(i, 0) = x[i];
  }
  Matrix w;
  try {
    w = ridge_solve(design, target, 0.0);
  } catch (const TsError&) {
    w = ridge_solve(design, target, 1e-9);
  }
  std::vector<double> coeff(degree + 1);
  for (std::size_t k = 0; k <= degree; ++k) coeff[k] = w(k, 0);
  return coeff;
}

double poly_eval(const std::vector<double>& coeff, double tau) {
  double v = 0.0, pow_t = 1.0;
  for (double c : coeff) {
    v += c * pow_t;
    pow_t *= tau;
  }
  return v;
}

}  // namespace

PolyTrend mt2r_fit_column(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) throw TsError("mt2r: need at least 4 rows");
  const std::size_t holdout = std::max<std::size_t>(1, n / 10);
  const std::size_t fit_n = n - holdout;

  double best_sse = std::numeric_limits<double>::infinity();
  std::size_t best_degree = 1;
  for (std::size_t degree = 1; degree <= 2; ++degree) {
    if (fit_n < degree + 1) continue;
    const std::vector<double> coeff = poly_fit(x, fit_n, degree, n);
    double sse = 0.0;
    for (std::size_t i = fit_n; i < n; ++i) {
      const double err = x[i] - poly_eval(coeff, static_cast<double>(i) / static_cast<double>(n));
      sse += err * err;
    }
    if (sse < best_sse) {
      best_sse = sse;
      best_degree = degree;
    }
  }

  PolyTrend p;
  p.degree = best_degree;
  p.n_fit = n;
  p.coefficients = poly_fit(x, n, best_degree, n);
  return p;
}

double poly_trend_value(const PolyTrend& p, std::size_t t) {
  return poly_eval(p.coefficients, static_cast<double>(t) / static_cast<double>(p.n_fit));
}

void Mt2r::fit(const TimeSeriesFrame& train, std::size_t horizon) {
  per_column_.clear();
  for (std::size_t c = 0; c < train.cols(); ++c) {
    per_column_.push_back(mt2r_fit_column(train.column(c)));
  }
  base_fit(horizon, train.cols());
}

Matrix Mt2r::predict(std::size_t horizon) const {
  require_fitted();
  Matrix out(horizon, d_);
  for (std::size_t c = 0; c < d_; ++c) {
    const PolyTrend& p = per_column_[c];
    for (std::size_t r = 0; r < horizon; ++r) out(r, c) = poly_trend_value(p, p.n_fit + r);
  }
  return out;
}

nlohmann::json Mt2r::to_json() const {
  nlohmann::json j = base_json();
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& p : per_column_) {
    cols.push_back({{"degree", p.degree}, {"coefficients", p.coefficients}, {"n_fit", p.n_fit}});
  }
  j["columns_state"] = cols;
  return j;
}

void Mt2r::load(const nlohmann::json& j) {
  base_load(j);
  per_column_.clear();
  for (const auto& jc : j.at("columns_state")) {
    PolyTrend p;
    p.degree = jc.at("degree").get<std::size_t>();
    p.coefficients = jc.at("coefficients").get<std::vector<double>>();
    p.n_fit = jc.at("n_fit").get<std::size_t>();
    per_column_.push_back(std::move(p));
  }
}

// ---------------------------------------------------------------- window

FittedWindowLearner window_regressor_fit(const Matrix& x, const Matrix& y, WindowLearner learner,
                                         std::uint64_t seed) {
  if (x.cols() == 0 || x.rows() == 0) throw TsError("window_regressor: degenerate design matrix");
  FittedWindowLearner out;
  out.learner = learner;
  if (learner == WindowLearner::Ridge) {
    Matrix design(x.rows(), x.cols() + 1);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) design(r, c) = x(r, c);
      design(r, x.cols()) = 1.0;
    }
    out.ridge_weights = ridge_solve(design, y, 1e-3);
  } else {
    TreeEnsemble::Params params;
    params.seed = seed;
    out.ensemble.fit(x, y, params);
  }
  return out;
}

std::vector<double> FittedWindowLearner::predict_row(const std::vector<double>& features) const {
  if (learner == WindowLearner::TreeEnsemble) return ensemble.predict_row(features);
  const std::size_t outputs = ridge_weights.cols();
  std::vector<double> out(outputs, 0.0);
  for (std::size_t o = 0; o < outputs; ++o) {
    double v = ridge_weights(features.size(), o);  // bias row
    for (std::size_t f = 0; f < features.size(); ++f) v += ridge_weights(f, o) * features[f];
    out[o] = v;
  }
  return out;
}

void WindowRegressor::fit(const TimeSeriesFrame& train, std::size_t horizon) {
  if (lookback_ < 1) throw TsError("window_regressor: lookback must be positive");
  const WindowedDataset ws = flatten(train, lookback_, horizon, variant_);
  const FittedWindowLearner fitted = window_regressor_fit(ws.x, ws.y, learner_, seed_);
  ridge_weights_ = fitted.ridge_weights;
  ensemble_ = fitted.ensemble;

  last_window_.assign(train.cols(), {});
  for (std::size_t c = 0; c < train.cols(); ++c) {
    const auto& x = train.column(c);
    last_window_[c].assign(x.end() - static_cast<std::ptrdiff_t>(lookback_), x.end());
  }
  base_fit(horizon, train.cols());
}

std::vector<double> WindowRegressor::predict_flat(const std::vector<double>& features) const {
  if (learner_ == WindowLearner::TreeEnsemble) return ensemble_.predict_row(features);
  const std::size_t outputs = ridge_weights_.cols();
  std::vector<double> out(outputs, 0.0);
  for (std::size_t o = 0; o < outputs; ++o) {
    double v = ridge_weights_(features.size(), o);
    for (std::size_t f = 0; f < features.size(); ++f) v += ridge_weights_(f, o) * features[f];
    out[o] = v;
  }
  return out;
}

Matrix WindowRegressor::predict(std::size_t horizon) const {
  require_fitted();
  if (horizon < 1) throw TsError("window_regressor: horizon must be positive");
  std::vector<std::vector<double>> window = last_window_;
  Matrix out(horizon, d_);
  std::size_t produced = 0;
  while (produced < horizon) {
    const ConditionedWindow cw = condition_window(window, variant_);
    const std::vector<double> flat = predict_flat(cw.features);
    const Matrix block = decondition_targets(flat, horizon_, d_, cw);
    const std::size_t take = std::min(horizon_, horizon - produced);
    for (std::size_t r = 0; r < take; ++r) {
      for (std::size_t c = 0; c < d_; ++c) out(produced + r, c) = block(r, c);
    }
    produced += take;
    if (produced < horizon) {
      // recursive extension: slide the window over the block just predicted
      for (std::size_t c = 0; c < d_; ++c) {
        for (std::size_t r = 0; r < take; ++r) window[c].push_back(block(r, c));
        window[c].erase(window[c].begin(),
                        window[c].begin() + static_cast<std::ptrdiff_t>(take));
      }
    }
  }
  return out;
}

nlohmann::json WindowRegressor::to_json() const {
  nlohmann::json j = base_json();
  j["variant"] = flatten_variant_name(variant_);
  j["lookback"] = lookback_;
  j["learner"] = learner_ == WindowLearner::Ridge ? "ridge" : "tree_ensemble";
  j["seed"] = seed_;
  j["last_window"] = last_window_;
  if (learner_ == WindowLearner::Ridge) {
    j["weights"] = ridge_weights_.data();
    j["weights_rows"] = ridge_weights_.rows();
    j["weights_cols"] = ridge_weights_.cols();
  } else {
    j["ensemble"] = ensemble_.to_json();
  }
  return j;
}

void WindowRegressor::load(const nlohmann::json& j) {
  base_load(j);
  variant_ = flatten_variant_from_name(j.at("variant").get<std::string>());
  lookback_ = j.at("lookback").get<std::size_t>();
  learner_ = j.at("learner").get<std::string>() == "ridge" ? WindowLearner::Ridge
                                                           : WindowLearner::TreeEnsemble;
  seed_ = j.at("seed").get<std::uint64_t>();
  last_window_ = j.at("last_window").get<std::vector<std::vector<double>>>();
  if (learner_ == WindowLearner::Ridge) {
    const auto rows = j.at("weights_rows").get<std::size_t>();
    const auto cols = j.at("weights_cols").get<std::size_t>();
    ridge_weights_ = Matrix(rows, cols);
    ridge_weights_.data() = j.at("weights").get<std::vector<double>>();
  } else {
    ensemble_.load(j.at("ensemble"));
  }
}

// ---------------------------------------------------------------- factory

std::unique_ptr<Estimator> estimator_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero_model") {
    auto e = std::make_unique<ZeroModel>();
    e->load(j);
    return e;
  }
  if (kind == "holt_winters") {
    auto e = std::make_unique<HoltWinters>(1, HwMode::Additive);
    e->load(j);
    return e;
  }
  if (kind == "ar_lite") {
    auto e = std::make_unique<ArLite>();
    e->load(j);
    return e;
  }
  if (kind == "mt2r") {
    auto e = std::make_unique<Mt2r>();
    e->load(j);
    return e;
  }
  if (kind == "window_regressor") {
    auto e = std::make_unique<WindowRegressor>(FlattenVariant::Plain, 8, WindowLearner::Ridge);
    e->load(j);
    return e;
  }
  throw TsError("unknown estimator kind: " + kind);
}

}  // namespace tsforge
