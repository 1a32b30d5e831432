#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"

namespace tsforge {

namespace {
void check_shapes(const Matrix& a, const Matrix& f) {
  if (a.rows() != f.rows() || a.cols() != f.cols()) throw TsError("metric: shape mismatch");
  if (a.rows() == 0 || a.cols() == 0) throw TsError("metric: empty input");
}
}  // namespace

double smape(const Matrix& actual, const Matrix& forecast) {
  check_shapes(actual, forecast);
  double sum = 0.0;
  const auto& a = actual.data();
  const auto& f = forecast.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::abs(a[i]) + std::abs(f[i]);
    // rounding in f-a versus |a|+|f| can push the ratio one ulp past 1
    if (denom > 0.0) sum += std::min(200.0 * std::abs(f[i] - a[i]) / denom, 200.0);
  }
  return sum / static_cast<double>(a.size());
}

double mae(const Matrix& actual, const Matrix& forecast) {
  check_shapes(actual, forecast);
  double sum = 0.0;
  const auto& a = actual.data();
  const auto& f = forecast.data();
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(f[i] - a[i]);
  return sum / static_cast<double>(a.size());
}

std::vector<std::size_t> rank_scores(const std::vector<double>& scores) {
  if (scores.empty()) throw TsError("rank_scores: empty input");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return scores[i] < scores[j]; });
  std::vector<std::size_t> ranks(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r + 1;
  return ranks;
}

}  // namespace tsforge
