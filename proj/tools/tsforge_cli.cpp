// Command-line front end. Talks to the engine exclusively through the C API
// so the CLI doubles as a smoke test of the shared-library surface.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsforge.h"

namespace {

struct Options {
  std::string input;
  std::string timestamp_col;
  std::size_t horizon = 12;
  double holdout = 0.2;
  std::optional<std::size_t> max_look_back;
  std::optional<std::size_t> lookback;
  std::size_t min_allocation = 0;
  std::size_t allocation = 0;
  std::size_t cutoff = 0;
  double geo = 2.0;
  std::size_t run_to_completion = 1;
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

std::string options_to_json(const Options& o) {
  nlohmann::json j;
  if (!o.timestamp_col.empty()) j["timestamp_column"] = o.timestamp_col;
  j["horizon"] = o.horizon;
  j["holdout"] = o.holdout;
  if (o.max_look_back) j["max_look_back"] = *o.max_look_back;
  if (o.lookback) j["lookback"] = *o.lookback;
  if (o.min_allocation) j["min_allocation"] = o.min_allocation;
  if (o.allocation) j["allocation"] = o.allocation;
  if (o.cutoff) j["cutoff"] = o.cutoff;
  j["geo"] = o.geo;
  j["run_to_completion"] = o.run_to_completion;
  j["jobs"] = o.jobs;
  std::uint64_t seed = 0;
  if (o.seed) {
    seed = *o.seed;
  } else if (const char* env = std::getenv("TSFORGE_SEED")) {
    seed = std::strtoull(env, nullptr, 10);
  }
  j["seed"] = seed;
  return j.dump();
}

void progress_printer(const char* phase, const char* pipeline, size_t allocation, double score,
                      double elapsed, void*) {
  std::fprintf(stderr, "[%s] %s alloc=%zu score=%.4f (%.3fs)\n", phase, pipeline, allocation,
               score, elapsed);
}

void write_file(const std::filesystem::path& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Takes ownership of the C string.
void write_owned(const std::filesystem::path& path, char* text) {
  try {
    write_file(path, text);
  } catch (...) {
    tsf_string_free(text);
    throw;
  }
  tsf_string_free(text);
}

int die(const std::string& context) {
  std::cerr << "error: " << context << ": " << tsf_last_error() << "\n";
  return 1;
}

int cmd_fit(const Options& o, bool quiet) {
  tsf_result* result = nullptr;
  const std::string opts = options_to_json(o);
  const int rc = tsf_fit_file(o.input.c_str(), opts.c_str(),
                              quiet ? nullptr : progress_printer, nullptr, &result);
  if (rc != TSF_OK) return die("fit");

  std::filesystem::create_directories(o.out_dir);
  const std::filesystem::path dir(o.out_dir);
  char* text = nullptr;
  if (tsf_result_report_json(result, &text) == TSF_OK) write_owned(dir / "report.json", text);
  if (tsf_result_report_csv(result, &text) == TSF_OK) write_owned(dir / "report.csv", text);
  if (tsf_result_model_json(result, &text) == TSF_OK) write_owned(dir / "model.json", text);

  char* winner = nullptr;
  tsf_result_winner_name(result, &winner);
  std::cout << "winner: " << (winner ? winner : "?")
            << "  holdout smape: " << tsf_result_holdout_smape(result) << "\n"
            << "artifacts in " << dir.string() << "\n";
  tsf_string_free(winner);
  tsf_result_free(result);
  return 0;
}

int cmd_predict(const std::string& model_path, std::size_t horizon, const std::string& out_path) {
  std::ifstream in(model_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << model_path << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  tsf_model* model = nullptr;
  if (tsf_model_load_json(buf.str().c_str(), &model) != TSF_OK) return die("load model");
  char* csv = nullptr;
  if (tsf_model_predict_csv(model, horizon, &csv) != TSF_OK) {
    tsf_model_free(model);
    return die("predict");
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
    tsf_string_free(csv);
  } else {
    write_owned(out_path, csv);
  }
  tsf_model_free(model);
  return 0;
}

int cmd_bench(const Options& o, bool quiet) {
  std::vector<std::string> paths;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(o.input, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      paths.push_back(entry.path().string());
    }
  }
  if (ec) {
    std::cerr << "error: cannot list " << o.input << ": " << ec.message() << "\n";
    return 1;
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    std::cerr << "error: no .csv files in " << o.input << "\n";
    return 1;
  }
  std::vector<const char*> cpaths;
  for (const auto& p : paths) cpaths.push_back(p.c_str());

  const std::string opts = options_to_json(o);
  char* report_json = nullptr;
  char* report_csv = nullptr;
  const int rc = tsf_bench(cpaths.data(), cpaths.size(), opts.c_str(),
                           quiet ? nullptr : progress_printer, nullptr, &report_json, &report_csv);
  if (rc != TSF_OK) return die("bench");

  std::filesystem::create_directories(o.out_dir);
  const std::filesystem::path dir(o.out_dir);
  write_owned(dir / "bench.json", report_json);
  write_owned(dir / "bench.csv", report_csv);
  std::cout << "benchmarked " << paths.size() << " datasets, artifacts in " << dir.string()
            << "\n";
  return 0;
}

int cmd_synth(std::size_t length, std::uint64_t seed, const std::string& out_path) {
  char* csv = nullptr;
  if (tsf_synth_corpus_csv(length, seed, &csv) != TSF_OK) return die("synth");
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
    tsf_string_free(csv);
  } else {
    write_owned(out_path, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automated time-series forecasting: pick, train and apply the best pipeline"};
  app.require_subcommand(1);

  Options o;
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress output");

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input) cmd->add_option("--input", o.input, "input CSV")->required();
    cmd->add_option("--timestamp-col", o.timestamp_col, "timestamp column name");
    cmd->add_option("--horizon", o.horizon, "prediction horizon")->check(CLI::PositiveNumber);
    cmd->add_option("--holdout", o.holdout, "holdout fraction");
    cmd->add_option("--max-look-back", o.max_look_back, "cap on look-back discovery");
    cmd->add_option("--lookback", o.lookback, "explicit look-back, skips discovery");
    cmd->add_option("--min-allocation", o.min_allocation, "selector minimum allocation");
    cmd->add_option("--allocation", o.allocation, "selector allocation unit");
    cmd->add_option("--cutoff", o.cutoff, "fixed allocation cutoff");
    cmd->add_option("--geo", o.geo, "geometric increment factor");
    cmd->add_option("--run-to-completion", o.run_to_completion, "finalists trained on full data");
    cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "random seed (env TSFORGE_SEED as fallback)");
    cmd->add_option("--out", o.out_dir, "output directory");
  };

  auto* fit = app.add_subcommand("fit", "train on a CSV and persist the best model");
  add_common(fit, true);

  std::string model_path, predict_out;
  std::size_t predict_horizon = 0;
  auto* predict = app.add_subcommand("predict", "forecast from a persisted model");
  predict->add_option("--model", model_path, "model.json path")->required();
  predict->add_option("--horizon", predict_horizon, "steps to forecast (0 = trained width)");
  predict->add_option("--out", predict_out, "output CSV path, '-' for stdout");

  auto* bench = app.add_subcommand("bench", "run fit over every CSV in a directory");
  add_common(bench, false);
  bench->add_option("--input", o.input, "directory of CSV datasets")->required();

  std::size_t synth_length = 2000;
  std::uint64_t synth_seed = 7;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write the synthetic verification corpus");
  synth->add_option("--length", synth_length, "rows per series")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--out", synth_out, "output CSV path, '-' for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(fit)) return cmd_fit(o, quiet);
    if (app.got_subcommand(predict)) return cmd_predict(model_path, predict_horizon, predict_out);
    if (app.got_subcommand(bench)) return cmd_bench(o, quiet);
    if (app.got_subcommand(synth)) return cmd_synth(synth_length, synth_seed, synth_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
