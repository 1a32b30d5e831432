#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsforge.h"

namespace {

std::string make_csv(std::size_t n) {
  std::ostringstream out;
  out << "x\n";
  out.precision(17);
  for (std::size_t t = 0; t < n; ++t) {
    out << 50 + 0.2 * static_cast<double>(t) +
               5 * std::sin(2 * M_PI * static_cast<double>(t) / 12.0)
        << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("null arguments are rejected with an error message") {
  CHECK(tsf_fit_csv(nullptr, nullptr, nullptr, nullptr, nullptr) == TSF_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(tsf_last_error()) > 0);
  tsf_result* r = nullptr;
  CHECK(tsf_fit_csv("x\nfoo\nbar\n", nullptr, nullptr, nullptr, &r) == TSF_ERR_DATA);
  CHECK(r == nullptr);
  CHECK(tsf_result_holdout_smape(nullptr) < 0.0);
}

TEST_CASE("bad options json surfaces as invalid argument") {
  tsf_result* r = nullptr;
  const std::string csv = make_csv(100);
  CHECK(tsf_fit_csv(csv.c_str(), "{not json", nullptr, nullptr, &r) == TSF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("fit, inspect, persist, reload, predict through the c surface") {
  const std::string csv = make_csv(400);
  std::size_t events = 0;
  const auto on_progress = [](const char* phase, const char* pipeline, size_t, double, double,
                              void* user) {
    CHECK(phase != nullptr);
    CHECK(pipeline != nullptr);
    ++*static_cast<std::size_t*>(user);
  };

  tsf_result* result = nullptr;
  REQUIRE(tsf_fit_csv(csv.c_str(), R"({"horizon": 12, "seed": 3})", on_progress, &events,
                      &result) == TSF_OK);
  REQUIRE(result != nullptr);
  CHECK(events > 0);

  char* report = nullptr;
  REQUIRE(tsf_result_report_json(result, &report) == TSF_OK);
  const nlohmann::json parsed = nlohmann::json::parse(report);
  CHECK(parsed.at("schema").get<int>() == 1);
  CHECK(parsed.at("pipelines").size() == 10);
  tsf_string_free(report);

  char* winner = nullptr;
  REQUIRE(tsf_result_winner_name(result, &winner) == TSF_OK);
  CHECK(std::strlen(winner) > 0);
  tsf_string_free(winner);
  CHECK(tsf_result_holdout_smape(result) >= 0.0);

  char* model_json = nullptr;
  REQUIRE(tsf_result_model_json(result, &model_json) == TSF_OK);
  tsf_result_free(result);

  tsf_model* model = nullptr;
  REQUIRE(tsf_model_load_json(model_json, &model) == TSF_OK);
  tsf_string_free(model_json);

  char* forecast = nullptr;
  REQUIRE(tsf_model_predict_csv(model, 5, &forecast) == TSF_OK);
  // header plus 5 rows
  std::size_t lines = 0;
  for (const char* p = forecast; *p; ++p) {
    if (*p == '\n') ++lines;
  }
  CHECK(lines == 6);
  tsf_string_free(forecast);
  tsf_model_free(model);

  CHECK(tsf_model_load_json("{\"schema\": 99}", &model) != TSF_OK);
}

TEST_CASE("synthetic corpus export") {
  char* csv = nullptr;
  REQUIRE(tsf_synth_corpus_csv(100, 7, &csv) == TSF_OK);
  std::string s(csv);
  tsf_string_free(csv);
  CHECK(s.find("dual_season_24_168") != std::string::npos);
  std::size_t lines = 0;
  for (char c : s) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == 101);
}
