#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/engine.hpp"
#include "core/pipeline.hpp"
#include "core/synthgen.hpp"
#include "core/tdaub.hpp"

using namespace tsforge;

namespace {

TimeSeriesFrame trend_season(std::size_t n, double period = 12.0) {
  std::vector<double> v(n);
  for (std::size_t t = 0; t < n; ++t) {
    v[t] = 50 + 0.2 * static_cast<double>(t) +
           5 * std::sin(2 * M_PI * static_cast<double>(t) / period);
  }
  return TimeSeriesFrame({std::move(v)}, {"x"}, std::nullopt);
}

QualityReport positive_quality(std::size_t cols = 1) {
  QualityReport q;
  q.missing_count.assign(cols, 0);
  q.has_negative.assign(cols, false);
  q.has_nonnumeric.assign(cols, false);
  return q;
}

lookback::LookbackRecommendation lw_of(std::size_t lw) {
  lookback::LookbackRecommendation rec;
  rec.candidates = {lw};
  rec.provenance = {lookback::Provenance::Default};
  rec.influence_ranks = {1.0};
  return rec;
}

// scrubs timing fields so reports can be compared across runs
void scrub(nlohmann::json& j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end();) {
      if (it.key().size() >= 8 && it.key().rfind("_seconds") == it.key().size() - 8) {
        it = j.erase(it);
      } else {
        scrub(it.value());
        ++it;
      }
    }
  } else if (j.is_array()) {
    for (auto& v : j) scrub(v);
  }
}

}  // namespace

TEST_CASE("catalog has ten pipelines for positive data, seven with negatives") {
  auto full = catalog(positive_quality(), lw_of(8), 12, 0);
  REQUIRE(full.size() == 10);
  const std::vector<std::string> names = {
      "ZeroModel",      "HW-Additive",        "HW-Multiplicative",
      "ARLite",         "MT2R",               "WindowRidge",
      "WindowTreeEnsemble", "FlattenRidge-log", "DifferenceFlattenTree-log",
      "LocalizedFlattenRidge"};
  for (std::size_t i = 0; i < names.size(); ++i) CHECK(full[i]->name() == names[i]);

  QualityReport neg = positive_quality();
  neg.has_negative[0] = true;
  auto gated = catalog(neg, lw_of(8), 12, 0);
  REQUIRE(gated.size() == 7);
  for (const auto& p : gated) {
    CHECK(p->name() != "HW-Multiplicative");
    CHECK(p->name().find("-log") == std::string::npos);
  }
}

TEST_CASE("pipeline failures score the sentinel instead of throwing") {
  // Holt-Winters with season 12 cannot fit 5 rows
  auto pipes = catalog(positive_quality(), lw_of(12), 4, 0);
  TimeSeriesFrame tiny = trend_season(5);
  TimeSeriesFrame test = trend_season(20).suffix(4);
  Pipeline& hw = *pipes[1];
  const double s = fit_predict_score(hw, tiny, test, 4);
  CHECK(s == kSentinelScore);
  CHECK(hw.failed());
  CHECK(!hw.failure_message().empty());
}

TEST_CASE("pipeline clone is independent and unfitted") {
  auto pipes = catalog(positive_quality(), lw_of(6), 4, 0);
  Pipeline& ar = *pipes[3];
  ar.fit(trend_season(100), 4);
  auto clone = ar.clone_unfitted();
  CHECK(!clone->fitted());
  CHECK(clone->name() == ar.name());
  clone->fit(trend_season(100), 4);
  Matrix a = ar.predict();
  Matrix b = clone->predict();
  for (std::size_t r = 0; r < a.rows(); ++r) CHECK(a(r, 0) == b(r, 0));
}

TEST_CASE("pipeline json round trip") {
  auto pipes = catalog(positive_quality(), lw_of(6), 4, 0);
  Pipeline& p = *pipes[7];  // FlattenRidge-log, exercises the chain too
  p.fit(trend_season(120), 4);
  auto loaded = Pipeline::from_json(p.to_json());
  Matrix a = p.predict();
  Matrix b = loaded->predict(4);
  for (std::size_t r = 0; r < 4; ++r) CHECK(a(r, 0) == doctest::Approx(b(r, 0)).epsilon(1e-12));
}

TEST_CASE("fixed allocation plans match hand arithmetic") {
  tdaub::TDaubConfig cfg;
  cfg.min_allocation_size = 100;
  cfg.allocation_size = 100;
  cfg.fixed_allocation_cutoff = 500;
  CHECK(tdaub::plan_fixed_allocations(cfg, 10000) ==
        std::vector<std::size_t>{100, 200, 300, 400, 500});
  CHECK(tdaub::plan_fixed_allocations(cfg, 350) == std::vector<std::size_t>{100, 200, 300, 350});

  tdaub::TDaubConfig d;  // default cutoff = 5 * allocation_size
  d.min_allocation_size = 10;
  d.allocation_size = 10;
  CHECK(tdaub::plan_fixed_allocations(d, 93) == std::vector<std::size_t>{10, 20, 30, 40, 50});
}

TEST_CASE("next_allocation uses the truncating formula") {
  tdaub::TDaubConfig cfg;
  cfg.allocation_size = 100;
  cfg.geo_increment_size = 2.0;
  CHECK(tdaub::next_allocation(500, cfg) == 1000);
  cfg.geo_increment_size = 1.5;
  CHECK(tdaub::next_allocation(500, cfg) == 700);  // int(7.5) * 100
}

TEST_CASE("extrapolation follows ols, clamps, and degenerates to the last score") {
  using tdaub::ScoreEntry;
  std::vector<ScoreEntry> a;
  double alloc = 100;
  for (double s : {10.0, 9.0, 8.0, 7.0, 6.0}) {
    a.push_back({static_cast<std::size_t>(alloc), s, 0, 0, false});
    alloc += 100;
  }
  // slope = -0.01/row, intercept 11: at L=700 the line gives 4.0
  CHECK(tdaub::extrapolate(a, 700) == doctest::Approx(4.0));
  // far extrapolation clamps at 0
  CHECK(tdaub::extrapolate(a, 100000) == 0.0);

  std::vector<ScoreEntry> single = {{100, 42.0, 0, 0, false}};
  CHECK(tdaub::extrapolate(single, 1000) == 42.0);

  std::vector<ScoreEntry> flat = {{100, 5.0, 0, 0, false}, {200, 5.0, 0, 0, false}};
  CHECK(tdaub::extrapolate(flat, 1000) == doctest::Approx(5.0));
}

TEST_CASE("selection is deterministic across worker counts") {
  TimeSeriesFrame train = trend_season(800);
  tdaub::TDaubConfig cfg;
  cfg.min_allocation_size = 40;
  cfg.allocation_size = 40;
  cfg.horizon = 12;

  auto run = [&](std::size_t jobs) {
    cfg.jobs = jobs;
    auto pipes = catalog(positive_quality(), lw_of(12), 12, 3);
    return tdaub::select(pipes, train, cfg);
  };
  tdaub::SelectionResult r1 = run(1);
  tdaub::SelectionResult r4 = run(4);
  CHECK(r1.winner->name() == r4.winner->name());
  CHECK(r1.final_ranking == r4.final_ranking);
  REQUIRE(r1.board.pipelines.size() == r4.board.pipelines.size());
  for (std::size_t j = 0; j < r1.board.pipelines.size(); ++j) {
    const auto& a = r1.board.pipelines[j];
    const auto& b = r4.board.pipelines[j];
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
      CHECK(a.history[i].allocation == b.history[i].allocation);
      CHECK(a.history[i].score == b.history[i].score);
    }
  }
}

TEST_CASE("reverse allocation never leaves the suffix") {
  TimeSeriesFrame train = trend_season(600);
  tdaub::TDaubConfig cfg;
  cfg.min_allocation_size = 30;
  cfg.allocation_size = 30;
  cfg.horizon = 8;
  auto pipes = catalog(positive_quality(), lw_of(12), 8, 1);
  tdaub::SelectionResult r = tdaub::select(pipes, train, cfg);
  CHECK(r.board.suffix_violations == 0);
  // per pipeline, allocations strictly increase
  for (const auto& pb : r.board.pipelines) {
    for (std::size_t i = 1; i < pb.history.size(); ++i) {
      CHECK(pb.history[i].allocation > pb.history[i - 1].allocation);
    }
  }
}

TEST_CASE("tiny datasets bypass the ladder") {
  TimeSeriesFrame train = trend_season(50);
  tdaub::TDaubConfig cfg;
  cfg.min_allocation_size = 100;
  cfg.allocation_size = 100;
  cfg.horizon = 4;
  auto pipes = catalog(positive_quality(), lw_of(6), 4, 1);
  tdaub::SelectionResult r = tdaub::select(pipes, train, cfg);
  CHECK(r.board.bypassed);
  for (const auto& pb : r.board.pipelines) {
    REQUIRE(pb.history.size() == 1);
    CHECK(pb.history[0].allocation == r.board.L);
  }
  CHECK(r.winner != nullptr);
}

TEST_CASE("all pipelines failing is an error") {
  // every candidate is a Holt-Winters needing more data than exists
  std::vector<std::unique_ptr<Pipeline>> pipes;
  pipes.push_back(std::make_unique<Pipeline>(
      "hw-a", TransformChain{}, std::make_unique<HoltWinters>(40, HwMode::Additive)));
  pipes.push_back(std::make_unique<Pipeline>(
      "hw-b", TransformChain{}, std::make_unique<HoltWinters>(50, HwMode::Additive)));
  TimeSeriesFrame train = trend_season(40);
  tdaub::TDaubConfig cfg;
  cfg.min_allocation_size = 10;
  cfg.allocation_size = 10;
  cfg.horizon = 4;
  CHECK_THROWS_WITH_AS(tdaub::select(pipes, train, cfg), doctest::Contains("no viable"),
                       TsError);
}

TEST_CASE("engine fit produces a coherent report and model") {
  TimeSeriesFrame data = trend_season(400);
  engine::RunConfig cfg;
  cfg.horizon = 12;
  cfg.seed = 5;
  engine::FitResult r = engine::fit(data, cfg);

  CHECK(r.report.at("schema").get<int>() == 1);
  CHECK(r.report.at("baseline").at("name") == "ZeroModel");
  CHECK(r.report.at("baseline").at("holdout_smape").get<double>() >= 0.0);
  CHECK(r.report.at("pipelines").size() == 10);
  // ranks are a permutation of 1..10 and the winner holds rank 1
  std::vector<bool> seen(10, false);
  std::string rank1;
  for (const auto& p : r.report.at("pipelines")) {
    const auto rank = p.at("rank").get<std::size_t>();
    REQUIRE(rank >= 1);
    REQUIRE(rank <= 10);
    CHECK(!seen[rank - 1]);
    seen[rank - 1] = true;
    if (rank == 1) rank1 = p.at("name").get<std::string>();
  }
  CHECK(rank1 == r.winner_name);

  // a good model beats the naive floor on this trending series
  CHECK(r.winner_holdout_smape <
        r.report.at("baseline").at("holdout_smape").get<double>());

  // model reload forecasts the same values
  Matrix direct = engine::predict_from_model(r.model, 12);
  CHECK(direct.rows() == 12);
  CHECK(direct.cols() == 1);
  const std::string csv = engine::predict_csv(r.model, 12);
  CHECK(csv.substr(0, 2) == "x\n");
}

TEST_CASE("lookback override skips discovery") {
  TimeSeriesFrame data = trend_season(300);
  engine::RunConfig cfg;
  cfg.lookback_override = 12;
  engine::FitResult r = engine::fit(data, cfg);
  CHECK(r.report.at("lookback").at("skipped").get<bool>());
  CHECK(r.report.at("lookback").at("candidates")[0].get<std::size_t>() == 12);
}

TEST_CASE("engine reports are identical across jobs after timing scrub") {
  TimeSeriesFrame data = trend_season(500);
  engine::RunConfig a, b;
  a.seed = b.seed = 9;
  a.jobs = 1;
  b.jobs = 4;
  nlohmann::json ra = engine::fit(data, a).report;
  nlohmann::json rb = engine::fit(data, b).report;
  ra.erase("selector");
  rb.erase("selector");  // jobs field differs by construction
  scrub(ra);
  scrub(rb);
  CHECK(ra == rb);
}

TEST_CASE("bench aggregates and survives a broken dataset") {
  const auto dir = std::filesystem::temp_directory_path() / "tsf_bench_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "good.csv");
    f << "x\n";
    TimeSeriesFrame d = trend_season(200);
    for (std::size_t r = 0; r < d.rows(); ++r) f << d.value(r, 0) << "\n";
  }
  {
    std::ofstream f(dir / "bad.csv");
    f << "x\nfoo\nbar\n";
  }
  engine::RunConfig cfg;
  engine::BenchResult r =
      engine::bench({(dir / "good.csv").string(), (dir / "bad.csv").string()}, cfg);
  REQUIRE(r.report.at("datasets").size() == 2);
  CHECK(!r.report.at("datasets")[0].contains("error"));
  CHECK(r.report.at("datasets")[1].contains("error"));
  CHECK(!r.report.at("summary").empty());
  CHECK_THROWS_AS(engine::bench({}, cfg), TsError);
}
