#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "frame.hpp"
#include "matrix.hpp"

namespace tsforge {

// Stateless transformers (Log, BoxCox, Fisher) map values independently of
// sequence position; Difference keeps the anchors it needs to undo itself and
// to continue forecasts past the end of the training data.
class Transformer {
 public:
  virtual ~Transformer() = default;
  virtual std::string name() const = 0;

  virtual TimeSeriesFrame fit_transform(const TimeSeriesFrame& frame) = 0;

  // Exact inverse of fit_transform on a whole frame.
  virtual TimeSeriesFrame inverse(const TimeSeriesFrame& frame) const = 0;

  // Inverse applied to an h×d forecast continuing past the training data.
  virtual Matrix inverse_forecast(const Matrix& pred) const = 0;

  virtual nlohmann::json to_json() const = 0;
  bool fitted() const { return fitted_; }

 protected:
  void require_fitted() const {
    if (!fitted_) throw TsError(const_cast<Transformer*>(this)->name() + ": not fitted");
  }
  bool fitted_ = false;
};

std::unique_ptr<Transformer> make_transformer(const std::string& name);
std::unique_ptr<Transformer> transformer_from_json(const nlohmann::json& j);

// Elementwise natural log; input must be strictly positive.
class LogTransform final : public Transformer {
 public:
  std::string name() const override { return "log"; }
  TimeSeriesFrame fit_transform(const TimeSeriesFrame& frame) override;
  TimeSeriesFrame inverse(const TimeSeriesFrame& frame) const override;
  Matrix inverse_forecast(const Matrix& pred) const override;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
};

// (x^λ − 1)/λ with λ fitted per column by profile log-likelihood over the
// grid λ ∈ {−2, −1.5, …, 2}; λ = 0 degenerates to log.
class BoxCoxTransform final : public Transformer {
 public:
  std::string name() const override { return "box_cox"; }
  TimeSeriesFrame fit_transform(const TimeSeriesFrame& frame) override;
  TimeSeriesFrame inverse(const TimeSeriesFrame& frame) const override;
  Matrix inverse_forecast(const Matrix& pred) const override;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  const std::vector<double>& lambdas() const { return lambdas_; }

 private:
  std::vector<double> lambdas_;
};

// atanh of the values min-max rescaled into (−0.999, 0.999) per column.
class FisherTransform final : public Transformer {
 public:
  std::string name() const override { return "fisher"; }
  TimeSeriesFrame fit_transform(const TimeSeriesFrame& frame) override;
  TimeSeriesFrame inverse(const TimeSeriesFrame& frame) const override;
  Matrix inverse_forecast(const Matrix& pred) const override;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);

 private:
  std::vector<double> mins_, maxs_;
};

// First difference x[i] − x[i−1]; stores the first row as anchor (frame
// inverse) and the last row (forecast continuation).
class DifferenceTransform final : public Transformer {
 public:
  std::string name() const override { return "difference"; }
  TimeSeriesFrame fit_transform(const TimeSeriesFrame& frame) override;
  TimeSeriesFrame inverse(const TimeSeriesFrame& frame) const override;
  Matrix inverse_forecast(const Matrix& pred) const override;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  const std::vector<double>& anchors() const { return anchors_; }

 private:
  std::vector<double> anchors_;      // first row per column
  std::vector<double> last_values_;  // last row per column
  std::int64_t anchor_time_ = 0;
  bool had_timestamps_ = false;
};

// Ordered transformer list; inverse applies in strictly reverse order.
class TransformChain {
 public:
  TransformChain() = default;
  explicit TransformChain(std::vector<std::unique_ptr<Transformer>> steps)
      : steps_(std::move(steps)) {}

  void push_back(std::unique_ptr<Transformer> t) { steps_.push_back(std::move(t)); }
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const Transformer& step(std::size_t i) const { return *steps_[i]; }

  TimeSeriesFrame fit_transform(const TimeSeriesFrame& frame);
  TimeSeriesFrame inverse(const TimeSeriesFrame& frame) const;
  Matrix inverse_forecast(const Matrix& pred) const;

  nlohmann::json to_json() const;
  static TransformChain from_json(const nlohmann::json& j);

 private:
  std::vector<std::unique_ptr<Transformer>> steps_;
};

enum class FlattenVariant { Plain, Localized, Normalized };

std::string flatten_variant_name(FlattenVariant v);
FlattenVariant flatten_variant_from_name(const std::string& s);

// Supervised lag dataset. X row i holds, series by series, the lw values
// starting at sample i; y row i the h following targets per series.
// Localized windows have their own last value subtracted from entries and
// targets; Normalized windows are z-scored by their own mean/stdev
// (stdev floor 1e-9), targets scaled identically.
struct WindowedDataset {
  Matrix x;        // (n−lw−h+1) × (lw·d)
  Matrix y;        // (n−lw−h+1) × (h·d)
  Matrix offsets;  // rows × d, 0 for Plain
  Matrix scales;   // rows × d, 1 for Plain/Localized
  std::size_t lw = 0, h = 0, d = 0;
  FlattenVariant variant = FlattenVariant::Plain;
};

WindowedDataset flatten(const TimeSeriesFrame& frame, std::size_t lw, std::size_t h,
                        FlattenVariant variant);

// Conditions one raw window (d series × lw values) for prediction time.
struct ConditionedWindow {
  std::vector<double> features;  // lw·d
  std::vector<double> offsets;   // d
  std::vector<double> scales;    // d
};
ConditionedWindow condition_window(const std::vector<std::vector<double>>& window_by_series,
                                   FlattenVariant variant);

// Undoes the per-window conditioning of a predicted target block (h·d flat,
// series-major) back into an h×d matrix.
Matrix decondition_targets(const std::vector<double>& predicted, std::size_t h, std::size_t d,
                           const ConditionedWindow& cw);

}  // namespace tsforge
