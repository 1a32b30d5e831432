#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forecasters.hpp"
#include "frame.hpp"
#include "lookback.hpp"
#include "transforms.hpp"

namespace tsforge {

// Transformer chain plus terminal estimator behaving as one fit/predict/score
// unit. Predictions come back in the original data scale: every chain inverse
// is applied in reverse order after the estimator's forecast.
class Pipeline {
 public:
  Pipeline(std::string name, TransformChain chain, std::unique_ptr<Estimator> estimator,
           std::optional<std::size_t> lookback = std::nullopt);

  const std::string& name() const { return name_; }
  bool fitted() const { return fitted_; }
  bool failed() const { return failed_; }
  const std::string& failure_message() const { return failure_message_; }
  std::optional<std::size_t> lookback() const { return lookback_; }
  double train_seconds() const { return train_seconds_; }
  double score_seconds() const { return score_seconds_; }

  void fit(const TimeSeriesFrame& train, std::size_t horizon);
  Matrix predict(std::size_t horizon) const;
  Matrix predict() const;
  std::size_t horizon() const;

  // SMAPE of an h-step forecast against the first h rows of test.
  double score(const TimeSeriesFrame& test) const;

  // Fresh unfitted copy with identical configuration.
  std::unique_ptr<Pipeline> clone_unfitted() const;

  nlohmann::json to_json() const;
  static std::unique_ptr<Pipeline> from_json(const nlohmann::json& j);

 private:
  friend double fit_predict_score(Pipeline&, const TimeSeriesFrame&, const TimeSeriesFrame&,
                                  std::size_t);

  std::string name_;
  TransformChain chain_;
  std::unique_ptr<Estimator> estimator_;
  std::optional<std::size_t> lookback_;
  bool fitted_ = false;
  bool failed_ = false;
  std::string failure_message_;
  double train_seconds_ = 0.0;
  double score_seconds_ = 0.0;
};

// Worst-possible SMAPE, used when a pipeline cannot fit or predict. One
// broken pipeline must not abort selection.
constexpr double kSentinelScore = 200.0;

// Fits on train, predicts h steps, scores SMAPE against the first h test
// rows. Failures become the sentinel score with the pipeline flagged.
double fit_predict_score(Pipeline& pipeline, const TimeSeriesFrame& train,
                         const TimeSeriesFrame& test, std::size_t horizon);

// The ten concrete pipelines, gated by the quality report: log variants are
// dropped for negative-valued data, multiplicative Holt-Winters too. Window
// models take the top-ranked look-back (8 when none was discovered).
std::vector<std::unique_ptr<Pipeline>> catalog(
    const QualityReport& quality, const lookback::LookbackRecommendation& lookbacks,
    std::size_t horizon, std::uint64_t seed = 0);

}  // namespace tsforge
