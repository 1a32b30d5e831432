#include "pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "metrics.hpp"

namespace tsforge {

namespace {
using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}
}  // namespace

Pipeline::Pipeline(std::string name, TransformChain chain, std::unique_ptr<Estimator> estimator,
                   std::optional<std::size_t> lookback)
    : name_(std::move(name)),
      chain_(std::move(chain)),
      estimator_(std::move(estimator)),
      lookback_(lookback) {
  if (!estimator_) throw TsError("pipeline: null estimator");
}

void Pipeline::fit(const TimeSeriesFrame& train, std::size_t horizon) {
  const auto start = Clock::now();
  fitted_ = false;
  failed_ = false;
  failure_message_.clear();
  const TimeSeriesFrame transformed = chain_.fit_transform(train);
  estimator_->fit(transformed, horizon);
  fitted_ = true;
  train_seconds_ = elapsed_seconds(start);
}

Matrix Pipeline::predict(std::size_t horizon) const {
  if (!fitted_) throw TsError("pipeline: predict before fit");
  return chain_.inverse_forecast(estimator_->predict(horizon));
}

Matrix Pipeline::predict() const { return predict(estimator_->horizon()); }

std::size_t Pipeline::horizon() const { return estimator_->horizon(); }

double Pipeline::score(const TimeSeriesFrame& test) const {
  const std::size_t h = std::min<std::size_t>(estimator_->horizon(), test.rows());
  const Matrix forecast = predict(h);
  Matrix actual(h, test.cols());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < test.cols(); ++c) actual(r, c) = test.value(r, c);
  }
  return smape(actual, forecast);
}

std::unique_ptr<Pipeline> Pipeline::clone_unfitted() const {
  TransformChain chain;
  for (std::size_t i = 0; i < chain_.size(); ++i) {
    chain.push_back(make_transformer(chain_.step(i).name()));
  }
  return std::make_unique<Pipeline>(name_, std::move(chain), estimator_->clone_unfitted(),
                                    lookback_);
}

nlohmann::json Pipeline::to_json() const {
  return {{"name", name_},
          {"chain", chain_.to_json()},
          {"estimator", estimator_->to_json()},
          {"lookback", lookback_ ? nlohmann::json(*lookback_) : nlohmann::json(nullptr)}};
}

std::unique_ptr<Pipeline> Pipeline::from_json(const nlohmann::json& j) {
  std::optional<std::size_t> lookback;
  if (!j.at("lookback").is_null()) lookback = j.at("lookback").get<std::size_t>();
  auto p = std::make_unique<Pipeline>(j.at("name").get<std::string>(),
                                      TransformChain::from_json(j.at("chain")),
                                      estimator_from_json(j.at("estimator")), lookback);
  p->fitted_ = true;
  return p;
}

double fit_predict_score(Pipeline& pipeline, const TimeSeriesFrame& train,
                         const TimeSeriesFrame& test, std::size_t horizon) {
  try {
    pipeline.fit(train, horizon);
    const auto start = Clock::now();
    const double s = pipeline.score(test);
    pipeline.score_seconds_ = elapsed_seconds(start);
    if (!std::isfinite(s)) throw TsError("non-finite score");
    return s;
  } catch (const std::exception& e) {
    pipeline.failed_ = true;
    pipeline.failure_message_ = e.what();
    return kSentinelScore;
  }
}

std::vector<std::unique_ptr<Pipeline>> catalog(
    const QualityReport& quality, const lookback::LookbackRecommendation& lookbacks,
    std::size_t horizon, std::uint64_t seed) {
  (void)horizon;
  const bool negative = quality.any_negative();
  const std::size_t lw =
      lookbacks.candidates.empty() ? 8 : std::max<std::size_t>(lookbacks.candidates[0], 2);
  const std::size_t season = lw;

  std::vector<std::unique_ptr<Pipeline>> out;
  auto add = [&](const std::string& name, std::vector<std::string> chain_names,
                 std::unique_ptr<Estimator> est, std::optional<std::size_t> plw) {
    TransformChain chain;
    for (const auto& n : chain_names) chain.push_back(make_transformer(n));
    out.push_back(std::make_unique<Pipeline>(name, std::move(chain), std::move(est), plw));
  };

  add("ZeroModel", {}, std::make_unique<ZeroModel>(), std::nullopt);
  add("HW-Additive", {}, std::make_unique<HoltWinters>(season, HwMode::Additive), std::nullopt);
  if (!negative) {
    add("HW-Multiplicative", {},
        std::make_unique<HoltWinters>(season, HwMode::Multiplicative), std::nullopt);
  }
  add("ARLite", {}, std::make_unique<ArLite>(), std::nullopt);
  add("MT2R", {}, std::make_unique<Mt2r>(), std::nullopt);
  add("WindowRidge", {},
      std::make_unique<WindowRegressor>(FlattenVariant::Plain, lw, WindowLearner::Ridge, seed),
      lw);
  add("WindowTreeEnsemble", {},
      std::make_unique<WindowRegressor>(FlattenVariant::Plain, lw, WindowLearner::TreeEnsemble,
                                        seed),
      lw);
  if (!negative) {
    add("FlattenRidge-log", {"log"},
        std::make_unique<WindowRegressor>(FlattenVariant::Plain, lw, WindowLearner::Ridge, seed),
        lw);
    add("DifferenceFlattenTree-log", {"log", "difference"},
        std::make_unique<WindowRegressor>(FlattenVariant::Plain, lw, WindowLearner::TreeEnsemble,
                                          seed),
        lw);
  }
  add("LocalizedFlattenRidge", {},
      std::make_unique<WindowRegressor>(FlattenVariant::Localized, lw, WindowLearner::Ridge, seed),
      lw);
  return out;
}

}  // namespace tsforge
