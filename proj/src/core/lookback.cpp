#include "lookback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tree.hpp"

namespace tsforge::lookback {

namespace {

struct CanonicalUnit {
  FrequencyUnit unit;
  double seconds;
};

constexpr CanonicalUnit kUnits[] = {
    {FrequencyUnit::Second, 1.0},
    {FrequencyUnit::Minute, 60.0},
    {FrequencyUnit::Hour, 3600.0},
    {FrequencyUnit::Day, 86400.0},
    {FrequencyUnit::Week, 604800.0},
    {FrequencyUnit::Month, 2592000.0},     // 30 days
    {FrequencyUnit::Year, 31557600.0},     // 365.25 days
};

std::vector<double> mean_adjusted(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - mean;
  return out;
}

}  // namespace

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::TimeIndex: return "time_index";
    case Provenance::ZeroCrossing: return "zero_crossing";
    case Provenance::Spectral: return "spectral";
    case Provenance::Default: return "default";
  }
  return "unknown";
}

Frequency infer_frequency(const std::vector<std::int64_t>& timestamps) {
  if (timestamps.size() < 3) return {};
  std::vector<std::int64_t> deltas;
  deltas.reserve(timestamps.size() - 1);
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    deltas.push_back(timestamps[i] - timestamps[i - 1]);
  }
  std::sort(deltas.begin(), deltas.end());
  const std::int64_t median = deltas[deltas.size() / 2];
  for (const auto& u : kUnits) {
    if (std::abs(static_cast<double>(median) - u.seconds) <= 0.05 * u.seconds) {
      return {u.unit, static_cast<std::int64_t>(u.seconds)};
    }
  }
  return {FrequencyUnit::Unknown, median};
}

std::vector<std::size_t> seasonal_periods(FrequencyUnit unit) {
  switch (unit) {
    case FrequencyUnit::Second:
      return {60, 3600, 86400, 604800, 2592000, 31557600};
    case FrequencyUnit::Minute:
      return {60, 1440, 10080, 43200, 525960};
    case FrequencyUnit::Hour:
      return {24, 168, 720, 8766};
    case FrequencyUnit::Day:
      return {7, 30, 365};  // 365.25 rounded
    case FrequencyUnit::Week:
      return {4, 52};
    case FrequencyUnit::Month:
      return {12};
    case FrequencyUnit::Year:
    case FrequencyUnit::Unknown:
      return {};
  }
  return {};
}

std::size_t zero_crossing_lookback(const std::vector<double>& x) {
  if (x.size() < 4) return 0;
  const std::vector<double> v = mean_adjusted(x);

  // signs with zeros taking the following segment's sign
  std::vector<int> sign(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) sign[i] = v[i] > 0.0 ? 1 : (v[i] < 0.0 ? -1 : 0);
  for (std::size_t i = v.size(); i-- > 0;) {
    if (sign[i] == 0) sign[i] = (i + 1 < v.size()) ? sign[i + 1] : 0;
  }

  std::vector<std::size_t> crossings;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (sign[i] != 0 && sign[i - 1] != 0 && sign[i] != sign[i - 1]) crossings.push_back(i);
  }
  if (crossings.size() < 2) return 0;
  double gap_sum = 0.0;
  for (std::size_t i = 1; i < crossings.size(); ++i) {
    gap_sum += static_cast<double>(crossings[i] - crossings[i - 1]);
  }
  return static_cast<std::size_t>(
      std::llround(gap_sum / static_cast<double>(crossings.size() - 1)));
}

std::size_t spectral_lookback(const std::vector<double>& x, std::size_t season) {
  if (season < 1 || x.size() < 2 * season) return 0;
  const std::size_t w = std::min(x.size(), 8 * season);
  std::vector<double> v(x.end() - static_cast<std::ptrdiff_t>(w), x.end());
  v = mean_adjusted(v);

  // direct DFT at Fourier frequencies k/w
  double best_power = 0.0;
  std::size_t best_k = 0;
  const double tau = 2.0 * M_PI / static_cast<double>(w);
  for (std::size_t k = 1; k <= w / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < w; ++t) {
      const double angle = tau * static_cast<double>(k) * static_cast<double>(t);
      re += v[t] * std::cos(angle);
      im -= v[t] * std::sin(angle);
    }
    const double power = re * re + im * im;
    if (power > best_power) {
      best_power = power;
      best_k = k;
    }
  }
  if (best_k == 0 || best_power <= 1e-18) return 0;
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(w) / static_cast<double>(best_k)));
}

InfluenceResult influence_rank(const std::vector<double>& x,
                               const std::vector<std::size_t>& candidates,
                               const LookbackConfig& cfg) {
  const std::size_t n = x.size();
  std::vector<std::size_t> usable;
  for (std::size_t lw : candidates) {
    if (lw >= 1 && lw + 1 <= n) usable.push_back(lw);
  }
  InfluenceResult result;
  if (usable.size() <= 1) {
    result.ordered = usable;
    result.average_ranks.assign(usable.size(), 1.0);
    return result;
  }

  std::vector<double> f_stat(usable.size(), 0.0);
  std::vector<double> neg_tree_mae(usable.size(), 0.0);

  for (std::size_t ci = 0; ci < usable.size(); ++ci) {
    const std::size_t lw = usable[ci];
    const std::size_t available = n - lw;  // window starts 0..n-lw-1
    const std::size_t samples = std::min(cfg.influence_sample_count, available);

    // sample starts uniformly without replacement, fixed seed per candidate
    Rng rng(cfg.seed * 0x2545f4914f6cdd1dULL + lw);
    std::vector<std::size_t> starts(available);
    std::iota(starts.begin(), starts.end(), 0);
    for (std::size_t i = 0; i < samples && i + 1 < available; ++i) {
      std::swap(starts[i], starts[i + rng.next_below(available - i)]);
    }
    starts.resize(samples);

    Matrix xs(samples, lw);
    Matrix ys(samples, 1);
    for (std::size_t i = 0; i < samples; ++i) {
      for (std::size_t k = 0; k < lw; ++k) xs(i, k) = x[starts[i] + k];
      ys(i, 0) = x[starts[i] + lw];  // next immediate observation
    }

    // (a) F-statistic of the full linear regression of y on X
    {
      Matrix design(samples, lw + 1);
      for (std::size_t i = 0; i < samples; ++i) {
        design(i, 0) = 1.0;
        for (std::size_t k = 0; k < lw; ++k) design(i, k + 1) = xs(i, k);
      }
      Matrix w;
      bool solved = false;
      // collinear lags (trends, constants) or large value scales can defeat
      // the plain normal equations; escalate the ridge until they factor
      double lambda = 0.0;
      for (int attempt = 0; attempt < 10 && !solved; ++attempt) {
        try {
          w = ridge_solve(design, ys, lambda);
          solved = true;
        } catch (const TsError&) {
          lambda = lambda == 0.0 ? 1e-10 : lambda * 1e2;
        }
      }
      double y_mean = 0.0;
      for (std::size_t i = 0; i < samples; ++i) y_mean += ys(i, 0);
      y_mean /= static_cast<double>(samples);
      double ss_tot = 0.0, ss_res = 0.0;
      for (std::size_t i = 0; i < samples && solved; ++i) {
        double pred = w(0, 0);
        for (std::size_t k = 0; k < lw; ++k) pred += w(k + 1, 0) * xs(i, k);
        ss_res += (ys(i, 0) - pred) * (ys(i, 0) - pred);
        ss_tot += (ys(i, 0) - y_mean) * (ys(i, 0) - y_mean);
      }
      const double df_den = static_cast<double>(samples) - static_cast<double>(lw) - 1.0;
      if (!solved || ss_tot <= 0.0 || df_den <= 0.0) {
        f_stat[ci] = 0.0;
      } else {
        const double r2 = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0 - 1e-15);
        f_stat[ci] = (r2 / static_cast<double>(lw)) / ((1.0 - r2) / df_den);
      }
    }

    // (b) negated MAE of a 10-tree depth-3 ensemble, 80/20 split of samples
    {
      const std::size_t train_n = std::max<std::size_t>(1, samples * 8 / 10);
      const std::size_t test_n = samples - train_n;
      if (test_n == 0) {
        neg_tree_mae[ci] = 0.0;
      } else {
        Matrix xtr(train_n, lw), ytr(train_n, 1);
        for (std::size_t i = 0; i < train_n; ++i) {
          for (std::size_t k = 0; k < lw; ++k) xtr(i, k) = xs(i, k);
          ytr(i, 0) = ys(i, 0);
        }
        TreeEnsemble ens;
        TreeEnsemble::Params params;
        params.n_trees = 10;
        params.max_depth = 3;
        params.seed = cfg.seed + lw;
        ens.fit(xtr, ytr, params);
        double mae_sum = 0.0;
        for (std::size_t i = train_n; i < samples; ++i) {
          const std::vector<double> p = ens.predict_row(xs.row(i));
          mae_sum += std::abs(p[0] - ys(i, 0));
        }
        neg_tree_mae[ci] = -mae_sum / static_cast<double>(test_n);
      }
    }
  }

  // per-measure ordinal ranks (1 = best = largest measure)
  auto ranks_of = [&](const std::vector<double>& measure) {
    std::vector<std::size_t> order(measure.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return measure[a] > measure[b]; });
    std::vector<double> ranks(measure.size());
    for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<double>(r + 1);
    return ranks;
  };
  const std::vector<double> rank_f = ranks_of(f_stat);
  const std::vector<double> rank_t = ranks_of(neg_tree_mae);

  std::vector<double> avg(usable.size());
  for (std::size_t i = 0; i < usable.size(); ++i) avg[i] = 0.5 * (rank_f[i] + rank_t[i]);

  std::vector<std::size_t> order(usable.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (avg[a] != avg[b]) return avg[a] < avg[b];
    return usable[a] < usable[b];
  });
  for (std::size_t i : order) {
    result.ordered.push_back(usable[i]);
    result.average_ranks.push_back(avg[i]);
  }
  return result;
}

namespace {

struct Candidate {
  std::size_t lw;
  Provenance provenance;
};

LookbackRecommendation discover_univariate(const std::vector<double>& x,
                                           const std::optional<std::vector<std::int64_t>>& ts,
                                           const LookbackConfig& cfg) {
  const std::size_t n = x.size();

  std::vector<Candidate> raw;
  std::vector<std::size_t> seasons;
  if (ts && ts->size() >= 3) {
    const Frequency freq = infer_frequency(*ts);
    seasons = seasonal_periods(freq.unit);
    for (std::size_t s : seasons) raw.push_back({s, Provenance::TimeIndex});
  }
  raw.push_back({zero_crossing_lookback(x), Provenance::ZeroCrossing});
  for (std::size_t s : seasons) {
    raw.push_back({spectral_lookback(x, s), Provenance::Spectral});
  }

  // sanity checks: drop ≥ n (a window needs a target), > max_look_back, 0 and 1; dedupe
  std::vector<Candidate> kept;
  for (const Candidate& c : raw) {
    if (c.lw <= 1) continue;
    if (c.lw + 1 > n) continue;
    if (cfg.max_look_back && c.lw > *cfg.max_look_back) continue;
    const bool dup = std::any_of(kept.begin(), kept.end(),
                                 [&](const Candidate& k) { return k.lw == c.lw; });
    if (!dup) kept.push_back(c);
  }

  LookbackRecommendation rec;
  if (kept.empty()) {
    rec.candidates = {cfg.default_lookback};
    rec.provenance = {Provenance::Default};
    rec.influence_ranks = {0.0};
    return rec;
  }

  std::vector<std::size_t> values;
  for (const Candidate& c : kept) values.push_back(c.lw);
  const InfluenceResult ranked = influence_rank(x, values, cfg);
  for (std::size_t i = 0; i < ranked.ordered.size(); ++i) {
    const std::size_t lw = ranked.ordered[i];
    const auto it = std::find_if(kept.begin(), kept.end(),
                                 [&](const Candidate& k) { return k.lw == lw; });
    rec.candidates.push_back(lw);
    rec.provenance.push_back(it->provenance);
    rec.influence_ranks.push_back(ranked.average_ranks[i]);
  }
  return rec;
}

}  // namespace

LookbackRecommendation discover(const TimeSeriesFrame& frame, const LookbackConfig& cfg) {
  std::optional<std::vector<std::int64_t>> ts;
  if (frame.has_timestamps()) ts = frame.timestamps();

  if (frame.cols() == 1) {
    return discover_univariate(frame.column(0), ts, cfg);
  }

  // Multivariate: one preferred value per series, processed in decreasing
  // order with the capping rule.
  const std::size_t d = frame.cols();
  std::vector<std::pair<std::size_t, double>> lwset;  // (lw, avg rank of source)
  for (std::size_t c = 0; c < d; ++c) {
    const LookbackRecommendation rec = discover_univariate(frame.column(c), ts, cfg);
    if (!rec.candidates.empty()) lwset.emplace_back(rec.candidates[0], rec.influence_ranks[0]);
  }
  std::stable_sort(lwset.begin(), lwset.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  LookbackRecommendation rec;
  for (const auto& [lw, rank] : lwset) {
    std::size_t selected = lw;
    if (cfg.max_look_back && lw * d > *cfg.max_look_back) {
      if (cfg.multivariate_ignore_violations) continue;
      selected = std::max<std::size_t>(1, *cfg.max_look_back / d);
    }
    if (std::find(rec.candidates.begin(), rec.candidates.end(), selected) !=
        rec.candidates.end()) {
      continue;
    }
    rec.candidates.push_back(selected);
    rec.provenance.push_back(Provenance::TimeIndex);
    rec.influence_ranks.push_back(rank);
  }
  if (rec.candidates.empty()) {
    rec.candidates = {cfg.default_lookback};
    rec.provenance = {Provenance::Default};
    rec.influence_ranks = {0.0};
  }
  return rec;
}

}  // namespace tsforge::lookback
