#include "transforms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace tsforge {

namespace {

TimeSeriesFrame map_frame(const TimeSeriesFrame& frame,
                          const std::function<double(double, std::size_t)>& fn) {
  std::vector<std::vector<double>> cols(frame.cols());
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    cols[c].resize(frame.rows());
    for (std::size_t r = 0; r < frame.rows(); ++r) cols[c][r] = fn(frame.value(r, c), c);
  }
  std::optional<std::vector<std::int64_t>> ts;
  if (frame.has_timestamps()) ts = frame.timestamps();
  return TimeSeriesFrame(std::move(cols), frame.column_names(), std::move(ts));
}

void require_positive(const TimeSeriesFrame& frame, const std::string& who) {
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    for (double v : frame.column(c)) {
      if (!(v > 0.0)) throw TsError(who + ": requires strictly positive values");
    }
  }
}

double box_cox_apply(double x, double lambda) {
  return lambda == 0.0 ? std::log(x) : (std::pow(x, lambda) - 1.0) / lambda;
}

double box_cox_invert(double y, double lambda) {
  return lambda == 0.0 ? std::exp(y) : std::pow(lambda * y + 1.0, 1.0 / lambda);
}

constexpr double kFisherBound = 0.999;

}  // namespace

// ---------------------------------------------------------------- Log

TimeSeriesFrame LogTransform::fit_transform(const TimeSeriesFrame& frame) {
  require_positive(frame, name());
  fitted_ = true;
  return map_frame(frame, [](double v, std::size_t) { return std::log(v); });
}

TimeSeriesFrame LogTransform::inverse(const TimeSeriesFrame& frame) const {
  require_fitted();
  return map_frame(frame, [](double v, std::size_t) { return std::exp(v); });
}

Matrix LogTransform::inverse_forecast(const Matrix& pred) const {
  require_fitted();
  Matrix out = pred;
  for (double& v : out.data()) v = std::exp(v);
  return out;
}

nlohmann::json LogTransform::to_json() const { return {{"kind", "log"}}; }
void LogTransform::load(const nlohmann::json&) { fitted_ = true; }

// ---------------------------------------------------------------- BoxCox

TimeSeriesFrame BoxCoxTransform::fit_transform(const TimeSeriesFrame& frame) {
  require_positive(frame, name());
  const std::size_t n = frame.rows();
  lambdas_.assign(frame.cols(), 1.0);
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    const auto& x = frame.column(c);
    double log_sum = 0.0;
    for (double v : x) log_sum += std::log(v);
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int step = -4; step <= 4; ++step) {
      const double lambda = 0.5 * step;
      // Profile log-likelihood: −n/2·ln σ̂² + (λ−1)Σln x.
      double mean = 0.0;
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = box_cox_apply(x[i], lambda);
        mean += y[i];
      }
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (double v : y) var += (v - mean) * (v - mean);
      var = std::max(var / static_cast<double>(n), 1e-300);
      const double ll = -0.5 * static_cast<double>(n) * std::log(var) + (lambda - 1.0) * log_sum;
      if (ll > best_ll) {
        best_ll = ll;
        lambdas_[c] = lambda;
      }
    }
  }
  fitted_ = true;
  return map_frame(frame, [this](double v, std::size_t c) { return box_cox_apply(v, lambdas_[c]); });
}

TimeSeriesFrame BoxCoxTransform::inverse(const TimeSeriesFrame& frame) const {
  require_fitted();
  return map_frame(frame, [this](double v, std::size_t c) { return box_cox_invert(v, lambdas_[c]); });
}

Matrix BoxCoxTransform::inverse_forecast(const Matrix& pred) const {
  require_fitted();
  Matrix out = pred;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = box_cox_invert(out(r, c), lambdas_[c]);
  }
  return out;
}

nlohmann::json BoxCoxTransform::to_json() const {
  return {{"kind", "box_cox"}, {"lambdas", lambdas_}};
}

void BoxCoxTransform::load(const nlohmann::json& j) {
  lambdas_ = j.at("lambdas").get<std::vector<double>>();
  fitted_ = true;
}

// ---------------------------------------------------------------- Fisher

TimeSeriesFrame FisherTransform::fit_transform(const TimeSeriesFrame& frame) {
  mins_.resize(frame.cols());
  maxs_.resize(frame.cols());
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    const auto& x = frame.column(c);
    mins_[c] = *std::min_element(x.begin(), x.end());
    maxs_[c] = *std::max_element(x.begin(), x.end());
  }
  fitted_ = true;
  return map_frame(frame, [this](double v, std::size_t c) {
    const double span = maxs_[c] - mins_[c];
    const double z = span > 0.0
                         ? -kFisherBound + 2.0 * kFisherBound * (v - mins_[c]) / span
                         : 0.0;
    return std::atanh(z);
  });
}

TimeSeriesFrame FisherTransform::inverse(const TimeSeriesFrame& frame) const {
  require_fitted();
  return map_frame(frame, [this](double v, std::size_t c) {
    const double span = maxs_[c] - mins_[c];
    const double z = std::tanh(v);
    return span > 0.0 ? mins_[c] + (z + kFisherBound) * span / (2.0 * kFisherBound) : mins_[c];
  });
}

Matrix FisherTransform::inverse_forecast(const Matrix& pred) const {
  require_fitted();
  Matrix out = pred;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      const double span = maxs_[c] - mins_[c];
      const double z = std::tanh(out(r, c));
      out(r, c) = span > 0.0 ? mins_[c] + (z + kFisherBound) * span / (2.0 * kFisherBound) : mins_[c];
    }
  }
  return out;
}

nlohmann::json FisherTransform::to_json() const {
  return {{"kind", "fisher"}, {"mins", mins_}, {"maxs", maxs_}};
}

void FisherTransform::load(const nlohmann::json& j) {
  mins_ = j.at("mins").get<std::vector<double>>();
  maxs_ = j.at("maxs").get<std::vector<double>>();
  fitted_ = true;
}

// ---------------------------------------------------------------- Difference

TimeSeriesFrame DifferenceTransform::fit_transform(const TimeSeriesFrame& frame) {
  if (frame.rows() < 2) throw TsError("difference: needs at least 2 rows");
  const std::size_t n = frame.rows();
  anchors_.resize(frame.cols());
  last_values_.resize(frame.cols());
  had_timestamps_ = frame.has_timestamps();
  anchor_time_ = frame.time_at(0);
  std::vector<std::vector<double>> cols(frame.cols());
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    const auto& x = frame.column(c);
    anchors_[c] = x[0];
    last_values_[c] = x[n - 1];
    cols[c].resize(n - 1);
    for (std::size_t i = 1; i < n; ++i) cols[c][i - 1] = x[i] - x[i - 1];
  }
  std::optional<std::vector<std::int64_t>> ts;
  if (frame.has_timestamps()) {
    ts.emplace(frame.timestamps().begin() + 1, frame.timestamps().end());
  }
  fitted_ = true;
  return TimeSeriesFrame(std::move(cols), frame.column_names(), std::move(ts));
}

TimeSeriesFrame DifferenceTransform::inverse(const TimeSeriesFrame& frame) const {
  require_fitted();
  const std::size_t n = frame.rows();
  std::vector<std::vector<double>> cols(frame.cols());
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    cols[c].resize(n + 1);
    cols[c][0] = anchors_[c];
    for (std::size_t i = 0; i < n; ++i) cols[c][i + 1] = cols[c][i] + frame.value(i, c);
  }
  std::optional<std::vector<std::int64_t>> ts;
  if (had_timestamps_ && frame.has_timestamps()) {
    std::vector<std::int64_t> t;
    t.reserve(n + 1);
    t.push_back(anchor_time_);
    for (std::int64_t v : frame.timestamps()) t.push_back(v);
    ts = std::move(t);
  }
  return TimeSeriesFrame(std::move(cols), frame.column_names(), std::move(ts));
}

Matrix DifferenceTransform::inverse_forecast(const Matrix& pred) const {
  require_fitted();
  Matrix out = pred;
  for (std::size_t c = 0; c < out.cols(); ++c) {
    double level = last_values_[c];
    for (std::size_t r = 0; r < out.rows(); ++r) {
      level += out(r, c);
      out(r, c) = level;
    }
  }
  return out;
}

nlohmann::json DifferenceTransform::to_json() const {
  return {{"kind", "difference"},
          {"anchors", anchors_},
          {"last_values", last_values_},
          {"anchor_time", anchor_time_},
          {"had_timestamps", had_timestamps_}};
}

void DifferenceTransform::load(const nlohmann::json& j) {
  anchors_ = j.at("anchors").get<std::vector<double>>();
  last_values_ = j.at("last_values").get<std::vector<double>>();
  anchor_time_ = j.at("anchor_time").get<std::int64_t>();
  had_timestamps_ = j.at("had_timestamps").get<bool>();
  fitted_ = true;
}

// ---------------------------------------------------------------- factory

std::unique_ptr<Transformer> make_transformer(const std::string& name) {
  if (name == "log") return std::make_unique<LogTransform>();
  if (name == "box_cox") return std::make_unique<BoxCoxTransform>();
  if (name == "fisher") return std::make_unique<FisherTransform>();
  if (name == "difference") return std::make_unique<DifferenceTransform>();
  throw TsError("unknown transformer: " + name);
}

std::unique_ptr<Transformer> transformer_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  auto t = make_transformer(kind);
  if (kind == "log") static_cast<LogTransform&>(*t).load(j);
  else if (kind == "box_cox") static_cast<BoxCoxTransform&>(*t).load(j);
  else if (kind == "fisher") static_cast<FisherTransform&>(*t).load(j);
  else static_cast<DifferenceTransform&>(*t).load(j);
  return t;
}

TimeSeriesFrame TransformChain::fit_transform(const TimeSeriesFrame& frame) {
  TimeSeriesFrame cur = frame;
  for (auto& t : steps_) cur = t->fit_transform(cur);
  return cur;
}

TimeSeriesFrame TransformChain::inverse(const TimeSeriesFrame& frame) const {
  TimeSeriesFrame cur = frame;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) cur = (*it)->inverse(cur);
  return cur;
}

Matrix TransformChain::inverse_forecast(const Matrix& pred) const {
  Matrix cur = pred;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) cur = (*it)->inverse_forecast(cur);
  return cur;
}

nlohmann::json TransformChain::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : steps_) arr.push_back(t->to_json());
  return arr;
}

TransformChain TransformChain::from_json(const nlohmann::json& j) {
  std::vector<std::unique_ptr<Transformer>> steps;
  for (const auto& e : j) steps.push_back(transformer_from_json(e));
  return TransformChain(std::move(steps));
}

// ---------------------------------------------------------------- flatten

std::string flatten_variant_name(FlattenVariant v) {
  switch (v) {
    case FlattenVariant::Plain: return "flatten";
    case FlattenVariant::Localized: return "localized_flatten";
    case FlattenVariant::Normalized: return "normalized_flatten";
  }
  return "flatten";
}

FlattenVariant flatten_variant_from_name(const std::string& s) {
  if (s == "flatten") return FlattenVariant::Plain;
  if (s == "localized_flatten") return FlattenVariant::Localized;
  if (s == "normalized_flatten") return FlattenVariant::Normalized;
  throw TsError("unknown flatten variant: " + s);
}

WindowedDataset flatten(const TimeSeriesFrame& frame, std::size_t lw, std::size_t h,
                        FlattenVariant variant) {
  const std::size_t n = frame.rows();
  const std::size_t d = frame.cols();
  if (lw < 1) throw TsError("flatten: lw must be positive");
  if (h < 1) throw TsError("flatten: h must be positive");
  if (n < lw + h) throw TsError("flatten: series too short for lw=" + std::to_string(lw) +
                                ", h=" + std::to_string(h));
  const std::size_t rows = n - lw - h + 1;

  WindowedDataset out;
  out.lw = lw;
  out.h = h;
  out.d = d;
  out.variant = variant;
  out.x = Matrix(rows, lw * d);
  out.y = Matrix(rows, h * d);
  out.offsets = Matrix(rows, d);
  out.scales = Matrix(rows, d, 1.0);

  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      const auto& x = frame.column(c);
      double offset = 0.0, scale = 1.0;
      if (variant == FlattenVariant::Localized) {
        offset = x[i + lw - 1];
      } else if (variant == FlattenVariant::Normalized) {
        double mean = 0.0;
        for (std::size_t k = 0; k < lw; ++k) mean += x[i + k];
        mean /= static_cast<double>(lw);
        double var = 0.0;
        for (std::size_t k = 0; k < lw; ++k) var += (x[i + k] - mean) * (x[i + k] - mean);
        offset = mean;
        scale = std::max(std::sqrt(var / static_cast<double>(lw)), 1e-9);
      }
      out.offsets(i, c) = offset;
      out.scales(i, c) = scale;
      for (std::size_t k = 0; k < lw; ++k) {
        out.x(i, c * lw + k) = (x[i + k] - offset) / scale;
      }
      for (std::size_t k = 0; k < h; ++k) {
        out.y(i, c * h + k) = (x[i + lw + k] - offset) / scale;
      }
    }
  }
  return out;
}

ConditionedWindow condition_window(const std::vector<std::vector<double>>& window_by_series,
                                   FlattenVariant variant) {
  const std::size_t d = window_by_series.size();
  if (d == 0) throw TsError("condition_window: empty window");
  const std::size_t lw = window_by_series[0].size();
  ConditionedWindow cw;
  cw.offsets.assign(d, 0.0);
  cw.scales.assign(d, 1.0);
  cw.features.resize(lw * d);
  for (std::size_t c = 0; c < d; ++c) {
    const auto& w = window_by_series[c];
    if (w.size() != lw) throw TsError("condition_window: ragged window");
    if (variant == FlattenVariant::Localized) {
      cw.offsets[c] = w[lw - 1];
    } else if (variant == FlattenVariant::Normalized) {
      double mean = 0.0;
      for (double v : w) mean += v;
      mean /= static_cast<double>(lw);
      double var = 0.0;
      for (double v : w) var += (v - mean) * (v - mean);
      cw.offsets[c] = mean;
      cw.scales[c] = std::max(std::sqrt(var / static_cast<double>(lw)), 1e-9);
    }
    for (std::size_t k = 0; k < lw; ++k) {
      cw.features[c * lw + k] = (w[k] - cw.offsets[c]) / cw.scales[c];
    }
  }
  return cw;
}

Matrix decondition_targets(const std::vector<double>& predicted, std::size_t h, std::size_t d,
                           const ConditionedWindow& cw) {
  if (predicted.size() != h * d) throw TsError("decondition_targets: size mismatch");
  Matrix out(h, d);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t k = 0; k < h; ++k) {
      out(k, c) = predicted[c * h + k] * cw.scales[c] + cw.offsets[c];
    }
  }
  return out;
}

}  // namespace tsforge
