#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "frame.hpp"
#include "transforms.hpp"
#include "tree.hpp"

namespace tsforge {

// Uniform estimator contract: fit on a frame, predict an h×d block of future
// values (rows = steps ahead, columns = input series). predict before fit is
// an error; fit resets any previous state so estimators are refittable.
class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual std::string kind() const = 0;
  virtual void fit(const TimeSeriesFrame& train, std::size_t horizon) = 0;
  virtual Matrix predict(std::size_t horizon) const = 0;
  Matrix predict() const { return predict(horizon_); }

  std::size_t horizon() const { return horizon_; }
  bool fitted() const { return fitted_; }

  virtual nlohmann::json to_json() const = 0;
  virtual std::unique_ptr<Estimator> clone_unfitted() const = 0;

 protected:
  void require_fitted() const {
    if (!fitted_) throw TsError("estimator: predict before fit");
  }
  void base_fit(std::size_t horizon, std::size_t cols) {
    if (horizon < 1) throw TsError("estimator: horizon must be positive");
    horizon_ = horizon;
    d_ = cols;
    fitted_ = true;
  }
  nlohmann::json base_json() const {
    return {{"kind", kind()}, {"horizon", horizon_}, {"columns", d_}};
  }
  void base_load(const nlohmann::json& j) {
    horizon_ = j.at("horizon").get<std::size_t>();
    d_ = j.at("columns").get<std::size_t>();
    fitted_ = true;
  }

  bool fitted_ = false;
  std::size_t horizon_ = 1;
  std::size_t d_ = 0;
};

std::unique_ptr<Estimator> estimator_from_json(const nlohmann::json& j);

// Repeats the most recent observed row for every future step.
Matrix zero_model_predict(const TimeSeriesFrame& train, std::size_t horizon);

class ZeroModel final : public Estimator {
 public:
  std::string kind() const override { return "zero_model"; }
  void fit(const TimeSeriesFrame& train, std::size_t horizon) override;
  Matrix predict(std::size_t horizon) const override;
  using Estimator::predict;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::unique_ptr<Estimator> clone_unfitted() const override {
    return std::make_unique<ZeroModel>();
  }

 private:
  std::vector<double> last_row_;
};

// ------------------------------------------------------------ Holt-Winters

enum class HwMode { Additive, Multiplicative };

struct HoltWintersParams {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  std::size_t season_length = 0;
  HwMode mode = HwMode::Additive;
  double level = 0.0, trend = 0.0;
  std::vector<double> seasonal;  // last m seasonal indices, oldest first
  double in_sample_sse = 0.0;
};

// Triple exponential smoothing. α, β, γ chosen from the grid
// {0.01, 0.05, 0.1, …, 0.95} by one-step-ahead in-sample squared error.
HoltWintersParams holt_winters_fit(const std::vector<double>& x, std::size_t season_length,
                                   HwMode mode);
std::vector<double> holt_winters_forecast(const HoltWintersParams& p, std::size_t horizon);

class HoltWinters final : public Estimator {
 public:
  HoltWinters(std::size_t season_length, HwMode mode)
      : season_length_(season_length), mode_(mode) {}
  std::string kind() const override { return "holt_winters"; }
  void fit(const TimeSeriesFrame& train, std::size_t horizon) override;
  Matrix predict(std::size_t horizon) const override;
  using Estimator::predict;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::unique_ptr<Estimator> clone_unfitted() const override {
    return std::make_unique<HoltWinters>(season_length_, mode_);
  }
  const std::vector<HoltWintersParams>& params() const { return per_column_; }

 private:
  std::size_t season_length_;
  HwMode mode_;
  std::vector<HoltWintersParams> per_column_;
};

// ------------------------------------------------------------ autoregression

struct ARParams {
  std::size_t order = 0;
  std::vector<double> coefficients;  // lag 1..p
  double intercept = 0.0;
  bool used_ridge_fallback = false;
  double aic = 0.0;
  std::vector<double> recent;  // last p observations, oldest first
};

// OLS on the lagged design for each p in 1..max_p, order selected by
// AIC = n·ln(SSE/n) + 2(p+1). Singular designs fall back to ridge 1e-6.
ARParams ar_fit(const std::vector<double>& x, std::size_t max_p);
std::vector<double> ar_forecast(const ARParams& p, std::size_t horizon);

class ArLite final : public Estimator {
 public:
  explicit ArLite(std::size_t max_p = 12) : max_p_(max_p) {}
  std::string kind() const override { return "ar_lite"; }
  void fit(const TimeSeriesFrame& train, std::size_t horizon) override;
  Matrix predict(std::size_t horizon) const override;
  using Estimator::predict;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::unique_ptr<Estimator> clone_unfitted() const override {
    return std::make_unique<ArLite>(max_p_);
  }
  const std::vector<ARParams>& params() const { return per_column_; }

 private:
  std::size_t max_p_;
  std::vector<ARParams> per_column_;
};

// ------------------------------------------------------------ trend regressor

struct PolyTrend {
  std::size_t degree = 1;
  std::vector<double> coefficients;  // c0 + c1·τ + c2·τ², τ = t/n_fit
  std::size_t n_fit = 0;
};

// Degree-≤2 polynomial of time per column, degree 1 vs 2 decided by SSE on
// the held-out last 10% of the training span.
PolyTrend mt2r_fit_column(const std::vector<double>& x);
double poly_trend_value(const PolyTrend& p, std::size_t t);

class Mt2r final : public Estimator {
 public:
  std::string kind() const override { return "mt2r"; }
  void fit(const TimeSeriesFrame& train, std::size_t horizon) override;
  Matrix predict(std::size_t horizon) const override;
  using Estimator::predict;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::unique_ptr<Estimator> clone_unfitted() const override { return std::make_unique<Mt2r>(); }

 private:
  std::vector<PolyTrend> per_column_;
};

// ------------------------------------------------------------ window models

enum class WindowLearner { Ridge, TreeEnsemble };

// Lag-window regressor: flattens the series into supervised (X, y) pairs and
// fits either closed-form ridge (λ = 1e-3) or the bagged tree ensemble with
// direct multi-output targets. Horizons past the trained width are produced
// by recursive extension.
class WindowRegressor final : public Estimator {
 public:
  WindowRegressor(FlattenVariant variant, std::size_t lookback, WindowLearner learner,
                  std::uint64_t seed = 0)
      : variant_(variant), lookback_(lookback), learner_(learner), seed_(seed) {}
  std::string kind() const override { return "window_regressor"; }
  void fit(const TimeSeriesFrame& train, std::size_t horizon) override;
  Matrix predict(std::size_t horizon) const override;
  using Estimator::predict;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::unique_ptr<Estimator> clone_unfitted() const override {
    return std::make_unique<WindowRegressor>(variant_, lookback_, learner_, seed_);
  }
  std::size_t lookback() const { return lookback_; }

 private:
  std::vector<double> predict_flat(const std::vector<double>& features) const;

  FlattenVariant variant_;
  std::size_t lookback_;
  WindowLearner learner_;
  std::uint64_t seed_;

  Matrix ridge_weights_;  // (lw·d + 1) × (h·d), bias row last
  TreeEnsemble ensemble_;
  std::vector<std::vector<double>> last_window_;  // per series, lw values
};

// Fits the chosen learner on an already-flattened dataset.
// Exposed for direct testing of the learners outside a pipeline.
struct FittedWindowLearner {
  WindowLearner learner;
  Matrix ridge_weights;
  TreeEnsemble ensemble;
  std::vector<double> predict_row(const std::vector<double>& features) const;
};
FittedWindowLearner window_regressor_fit(const Matrix& x, const Matrix& y, WindowLearner learner,
                                         std::uint64_t seed = 0);

}  // namespace tsforge
