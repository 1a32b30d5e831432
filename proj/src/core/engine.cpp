#include "engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "forecasters.hpp"
#include "metrics.hpp"
#include "synthgen.hpp"

namespace tsforge::engine {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Same arithmetic as temporal_split: first ⌈f·n⌉ rows.
std::size_t split_train_rows(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
}

nlohmann::json quality_to_json(const QualityReport& q) {
  nlohmann::json repairs = nlohmann::json::array();
  for (const auto& r : q.repairs_applied) {
    repairs.push_back({{"row", r.row}, {"col", r.col}, {"method", r.method}});
  }
  return {{"missing_count", q.missing_count},
          {"has_negative", q.has_negative},
          {"has_nonnumeric", q.has_nonnumeric},
          {"inferred_frequency_seconds",
           q.inferred_frequency_seconds ? nlohmann::json(*q.inferred_frequency_seconds)
                                        : nlohmann::json(nullptr)},
          {"repairs", repairs}};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (horizon == 0) throw TsError("engine: horizon must be positive");
  if (!(holdout_fraction > 0.0) || !(holdout_fraction < 1.0)) {
    throw TsError("engine: holdout fraction must lie in (0, 1)");
  }
  if (!(tdaub_test_fraction > 0.0) || !(tdaub_test_fraction < 1.0)) {
    throw TsError("engine: selector test fraction must lie in (0, 1)");
  }
  if (!(geo > 1.0)) throw TsError("engine: geo increment must exceed 1");
  if (run_to_completion == 0) throw TsError("engine: run_to_completion must be positive");
  if (lookback_override && *lookback_override < 2) {
    throw TsError("engine: lookback override must be at least 2");
  }
}

FitResult fit(const TimeSeriesFrame& raw, const RunConfig& cfg, const tdaub::ProgressSink& sink) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  auto [frame, quality] = quality_check(raw);
  const TemporalSplit outer = temporal_split(frame, 1.0 - cfg.holdout_fraction);
  const TimeSeriesFrame& train = outer.train;
  const TimeSeriesFrame& holdout = outer.holdout;
  const std::size_t h = cfg.horizon;
  const std::size_t hh = std::min<std::size_t>(h, holdout.rows());

  // The floor every candidate must beat: repeat the last observed row.
  Pipeline baseline("ZeroModel", TransformChain{}, std::make_unique<ZeroModel>());
  const double baseline_smape = fit_predict_score(baseline, train, holdout, h);
  const Matrix holdout_head = holdout.head(hh).to_matrix();
  double baseline_mae = 0.0;
  if (!baseline.failed()) baseline_mae = mae(holdout_head, baseline.predict(hh));

  lookback::LookbackRecommendation rec;
  bool discovery_skipped = false;
  if (cfg.lookback_override) {
    discovery_skipped = true;
    rec.candidates = {*cfg.lookback_override};
    rec.provenance = {lookback::Provenance::Default};
    rec.influence_ranks = {0.0};
  } else {
    lookback::LookbackConfig lcfg;
    lcfg.max_look_back = cfg.max_look_back;
    lcfg.seed = cfg.seed;
    rec = lookback::discover(train, lcfg);
  }

  auto pipelines = catalog(quality, rec, h, cfg.seed);

  tdaub::TDaubConfig tcfg;
  const std::size_t l1 = split_train_rows(train.rows(), 1.0 - cfg.tdaub_test_fraction);
  tcfg.min_allocation_size =
      cfg.min_allocation > 0 ? cfg.min_allocation
                             : std::max<std::size_t>((l1 + 19) / 20, 10);
  tcfg.allocation_size = cfg.allocation > 0 ? cfg.allocation : tcfg.min_allocation_size;
  tcfg.fixed_allocation_cutoff = cfg.cutoff;
  tcfg.geo_increment_size = cfg.geo;
  tcfg.run_to_completion = cfg.run_to_completion;
  tcfg.test_fraction = cfg.tdaub_test_fraction;
  tcfg.horizon = h;
  tcfg.jobs = cfg.jobs;

  tdaub::SelectionResult sel = tdaub::select(pipelines, train, tcfg, sink);

  const Matrix winner_forecast = sel.winner->predict(hh);
  const double winner_smape = smape(holdout_head, winner_forecast);
  const double winner_mae = mae(holdout_head, winner_forecast);

  // Ranks: position in the final ordering, 1-based, a permutation of 1..np.
  std::vector<std::size_t> rank_of(pipelines.size(), 0);
  for (std::size_t pos = 0; pos < sel.final_ranking.size(); ++pos) {
    rank_of[sel.final_ranking[pos]] = pos + 1;
  }

  nlohmann::json pipeline_rows = nlohmann::json::array();
  for (std::size_t j = 0; j < pipelines.size(); ++j) {
    const auto& pb = sel.board.pipelines[j];
    nlohmann::json allocations = nlohmann::json::array();
    double train_s = 0.0, score_s = 0.0;
    bool any_failed = false;
    for (const auto& e : pb.history) {
      allocations.push_back({{"allocation", e.allocation},
                             {"score", e.score},
                             {"failed", e.failed},
                             {"train_seconds", e.train_seconds},
                             {"score_seconds", e.score_seconds}});
      train_s += e.train_seconds;
      score_s += e.score_seconds;
      any_failed = any_failed || e.failed;
    }
    pipeline_rows.push_back(
        {{"name", pb.name},
         {"rank", rank_of[j]},
         {"selection_score", pb.final_score ? *pb.final_score : pb.extrapolated},
         {"extrapolated_score", pb.extrapolated},
         {"full_score", pb.final_score ? nlohmann::json(*pb.final_score) : nlohmann::json(nullptr)},
         {"any_failed", any_failed},
         {"allocations", allocations},
         {"train_seconds", train_s},
         {"score_seconds", score_s}});
  }

  nlohmann::json lookback_json = {
      {"skipped", discovery_skipped},
      {"candidates", rec.candidates},
      {"influence_ranks", rec.influence_ranks},
  };
  {
    nlohmann::json prov = nlohmann::json::array();
    for (auto p : rec.provenance) prov.push_back(lookback::provenance_name(p));
    lookback_json["provenance"] = prov;
  }

  FitResult out;
  out.winner_name = sel.winner->name();
  out.winner_holdout_smape = winner_smape;
  out.report = {
      {"schema", 1},
      {"input",
       {{"rows", frame.rows()},
        {"cols", frame.cols()},
        {"columns", frame.column_names()},
        {"quality", quality_to_json(quality)}}},
      {"horizon", h},
      {"holdout_fraction", cfg.holdout_fraction},
      {"seed", cfg.seed},
      {"lookback", lookback_json},
      {"baseline",
       {{"name", "ZeroModel"},
        {"holdout_smape", baseline_smape},
        {"holdout_mae", baseline_mae}}},
      {"selector",
       {{"min_allocation_size", tcfg.min_allocation_size},
        {"allocation_size", tcfg.allocation_size},
        {"fixed_allocation_cutoff", tcfg.cutoff()},
        {"geo_increment_size", tcfg.geo_increment_size},
        {"run_to_completion", tcfg.run_to_completion},
        {"test_fraction", tcfg.test_fraction},
        {"jobs", cfg.jobs},
        {"bypassed", sel.board.bypassed},
        {"training_length", sel.board.L},
        {"suffix_violations", sel.board.suffix_violations},
        {"rows_trained", sel.board.rows_trained}}},
      {"pipelines", pipeline_rows},
      {"winner",
       {{"name", sel.winner->name()},
        {"holdout_smape", winner_smape},
        {"holdout_mae", winner_mae},
        {"selection_score", sel.winner_t2_score}}},
      {"total_seconds", seconds_since(t0)},
  };

  std::ostringstream csv;
  csv << "pipeline,rank,selection_score,any_failed,train_seconds,score_seconds\n";
  // rank order, straight from the final ranking
  for (std::size_t pos = 0; pos < sel.final_ranking.size(); ++pos) {
    const std::size_t j = sel.final_ranking[pos];
    const auto& pb = sel.board.pipelines[j];
    double train_s = 0.0, score_s = 0.0;
    bool any_failed = false;
    for (const auto& e : pb.history) {
      train_s += e.train_seconds;
      score_s += e.score_seconds;
      any_failed = any_failed || e.failed;
    }
    csv << csv_escape(pb.name) << ',' << (pos + 1) << ','
        << (pb.final_score ? *pb.final_score : pb.extrapolated) << ','
        << (any_failed ? 1 : 0) << ',' << train_s << ',' << score_s << '\n';
  }
  out.report_csv = csv.str();

  out.model = {{"schema", 1},
               {"pipeline", sel.winner->to_json()},
               {"horizon", h},
               {"columns", frame.column_names()},
               {"trained_rows", train.rows()}};
  return out;
}

FitResult fit_file(const std::string& path, const RunConfig& cfg,
                   const tdaub::ProgressSink& sink) {
  return fit(load_csv(path, cfg.timestamp_column), cfg, sink);
}

Matrix predict_from_model(const nlohmann::json& model, std::optional<std::size_t> h) {
  if (!model.contains("schema") || model.at("schema").get<int>() != 1) {
    throw TsError("model: unsupported schema");
  }
  auto pipeline = Pipeline::from_json(model.at("pipeline"));
  const std::size_t steps = h ? *h : model.at("horizon").get<std::size_t>();
  if (steps == 0) throw TsError("model: horizon must be positive");
  return pipeline->predict(steps);
}

std::string predict_csv(const nlohmann::json& model, std::optional<std::size_t> h) {
  const Matrix pred = predict_from_model(model, h);
  std::vector<std::string> names;
  if (model.contains("columns")) names = model.at("columns").get<std::vector<std::string>>();
  std::ostringstream out;
  for (std::size_t c = 0; c < pred.cols(); ++c) {
    if (c) out << ',';
    out << csv_escape(c < names.size() ? names[c] : "series_" + std::to_string(c));
  }
  out << '\n';
  out.precision(17);
  for (std::size_t r = 0; r < pred.rows(); ++r) {
    for (std::size_t c = 0; c < pred.cols(); ++c) {
      if (c) out << ',';
      out << pred(r, c);
    }
    out << '\n';
  }
  return out.str();
}

BenchResult bench(const std::vector<std::string>& csv_paths, const RunConfig& cfg,
                  const tdaub::ProgressSink& sink) {
  if (csv_paths.empty()) throw TsError("bench: no datasets given");

  nlohmann::json datasets = nlohmann::json::array();
  std::ostringstream csv;
  csv << "dataset,pipeline,rank,selection_score,winner_holdout_smape\n";
  std::map<std::string, std::pair<double, std::size_t>> rank_sums;  // name -> (sum, count)

  for (const auto& path : csv_paths) {
    try {
      FitResult r = fit_file(path, cfg, sink);
      for (const auto& row : r.report.at("pipelines")) {
        const std::string name = row.at("name").get<std::string>();
        const std::size_t rank = row.at("rank").get<std::size_t>();
        rank_sums[name].first += static_cast<double>(rank);
        rank_sums[name].second += 1;
        csv << csv_escape(path) << ',' << csv_escape(name) << ',' << rank << ','
            << row.at("selection_score").get<double>() << ',' << r.winner_holdout_smape << '\n';
      }
      datasets.push_back({{"dataset", path},
                          {"winner", r.winner_name},
                          {"winner_holdout_smape", r.winner_holdout_smape},
                          {"pipelines", r.report.at("pipelines")}});
    } catch (const std::exception& e) {
      datasets.push_back({{"dataset", path}, {"error", e.what()}});
      csv << csv_escape(path) << ",ERROR,," << csv_escape(e.what()) << ",\n";
    }
  }

  nlohmann::json summary = nlohmann::json::array();
  csv << "\nsummary_pipeline,mean_rank,datasets\n";
  for (const auto& [name, agg] : rank_sums) {
    const double mean_rank = agg.first / static_cast<double>(agg.second);
    summary.push_back({{"pipeline", name}, {"mean_rank", mean_rank}, {"datasets", agg.second}});
    csv << csv_escape(name) << ',' << mean_rank << ',' << agg.second << '\n';
  }

  BenchResult out;
  out.report = {{"schema", 1}, {"datasets", datasets}, {"summary", summary}};
  out.csv = csv.str();
  return out;
}

std::string synth_corpus_csv(std::size_t length, std::uint64_t seed) {
  return synth::corpus(length, seed).to_csv();
}

}  // namespace tsforge::engine
