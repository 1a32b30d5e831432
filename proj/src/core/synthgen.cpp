#include "synthgen.hpp"

#include <algorithm>
#include <cmath>

namespace tsforge::synth {

namespace {
constexpr double kTau = 6.283185307179586476925286766559;

std::vector<std::size_t> sample_positions(std::size_t n, std::size_t count, Rng& rng) {
  // Fisher-Yates over an index vector; deterministic under the Rng.
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < count && i + 1 < n; ++i) {
    const std::size_t j = i + rng.next_below(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(std::min(count, n));
  std::sort(idx.begin(), idx.end());
  return idx;
}
}  // namespace

std::string kind_name(SignalKind kind) {
  switch (kind) {
    case SignalKind::Linear: return "linear";
    case SignalKind::Constant: return "constant";
    case SignalKind::LinearNoise: return "linear_noise";
    case SignalKind::Exponential: return "exponential";
    case SignalKind::InverseExponential: return "inverse_exponential";
    case SignalKind::Sine: return "sine";
    case SignalKind::Cosine: return "cosine";
    case SignalKind::SineCosineOutliers: return "sine_cosine_outliers";
    case SignalKind::Square: return "square";
    case SignalKind::TrendedWave: return "trended_wave";
    case SignalKind::Log: return "log";
    case SignalKind::LogVariance: return "log_variance";
    case SignalKind::DualSeason: return "dual_season";
    case SignalKind::CosineGrowingAmplitude: return "cosine_growing_amplitude";
  }
  return "unknown";
}

TimeSeriesFrame generate(const SignalSpec& spec) {
  if (spec.length == 0) throw TsError("synth: zero length");
  if (spec.period == 0 || spec.period2 == 0) throw TsError("synth: nonpositive period");
  const std::size_t n = spec.length;
  const double nd = static_cast<double>(n);
  Rng rng(spec.seed);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    const double p = static_cast<double>(spec.period);
    double x = 0.0;
    switch (spec.kind) {
      case SignalKind::Linear:
        x = spec.level + spec.slope * t;
        break;
      case SignalKind::Constant:
        x = spec.level;
        break;
      case SignalKind::LinearNoise:
        x = spec.level + spec.slope * t + spec.noise_sd * rng.next_normal();
        break;
      case SignalKind::Exponential:
        x = spec.level * std::exp(spec.growth * t);
        break;
      case SignalKind::InverseExponential:
        x = spec.level + spec.amplitude * std::exp(-spec.growth * t);
        break;
      case SignalKind::Sine:
        x = spec.level + spec.amplitude * std::sin(kTau * t / p);
        break;
      case SignalKind::Cosine:
        x = spec.level + spec.amplitude * std::cos(kTau * t / p);
        break;
      case SignalKind::SineCosineOutliers:
        x = spec.level +
            spec.amplitude * (std::sin(kTau * t / p) + std::cos(kTau * t / p));
        break;
      case SignalKind::Square:
        x = spec.level + (std::sin(kTau * t / p) >= 0.0 ? spec.amplitude : -spec.amplitude);
        break;
      case SignalKind::TrendedWave:
        x = spec.level + spec.slope * t + spec.amplitude * std::sin(kTau * t / p);
        break;
      case SignalKind::Log:
        x = spec.level + spec.amplitude * std::log1p(t);
        break;
      case SignalKind::LogVariance:
        x = std::log1p(t) + spec.noise_sd * std::log1p(t) * rng.next_normal();
        break;
      case SignalKind::DualSeason:
        x = std::sin(kTau * t / p) + 0.5 * std::sin(kTau * t / static_cast<double>(spec.period2));
        break;
      case SignalKind::CosineGrowingAmplitude:
        x = (1.0 + t / nd) * std::cos(kTau * t / p);
        break;
    }
    v[i] = x;
  }

  if (spec.kind == SignalKind::SineCosineOutliers) {
    const auto count = static_cast<std::size_t>(
        std::llround(spec.outlier_rate * static_cast<double>(n)));
    Rng pos_rng(spec.seed ^ 0xa5a5a5a5ULL);
    for (const std::size_t i : sample_positions(n, count, pos_rng)) {
      v[i] += spec.outlier_magnitude * spec.amplitude;
    }
  }

  std::vector<std::int64_t> ts(n);
  for (std::size_t i = 0; i < n; ++i) ts[i] = static_cast<std::int64_t>(i);
  const std::string name = spec.name.empty() ? kind_name(spec.kind) : spec.name;
  return TimeSeriesFrame({std::move(v)}, {name}, std::move(ts));
}

TimeSeriesFrame corpus(std::size_t length, std::uint64_t seed) {
  std::vector<SignalSpec> specs;
  auto add = [&](SignalKind kind, const std::string& name, auto mutate) {
    SignalSpec s;
    s.kind = kind;
    s.length = length;
    s.seed = seed + specs.size();
    s.name = name;
    mutate(s);
    specs.push_back(s);
  };
  auto id = [](SignalSpec&) {};

  add(SignalKind::Linear, "linear", id);
  add(SignalKind::Constant, "constant", id);
  add(SignalKind::LinearNoise, "linear_noise", [](SignalSpec& s) { s.noise_sd = 0.05; });
  add(SignalKind::Exponential, "exponential", id);
  add(SignalKind::InverseExponential, "inverse_exponential",
      [](SignalSpec& s) { s.amplitude = 5.0; s.growth = 0.002; });
  add(SignalKind::Sine, "sine_24", [](SignalSpec& s) { s.period = 24; });
  add(SignalKind::Sine, "sine_168", [](SignalSpec& s) { s.period = 168; });
  add(SignalKind::Cosine, "cosine_24", [](SignalSpec& s) { s.period = 24; });
  add(SignalKind::Cosine, "cosine_168", [](SignalSpec& s) { s.period = 168; });
  add(SignalKind::SineCosineOutliers, "sine_cosine_outliers",
      [](SignalSpec& s) { s.period = 24; });
  add(SignalKind::Square, "square_50", [](SignalSpec& s) { s.period = 50; });
  add(SignalKind::Square, "square_200", [](SignalSpec& s) { s.period = 200; });
  add(SignalKind::TrendedWave, "trended_wave_24",
      [](SignalSpec& s) { s.period = 24; s.slope = 0.01; });
  add(SignalKind::TrendedWave, "trended_wave_168",
      [](SignalSpec& s) { s.period = 168; s.slope = 0.005; });
  add(SignalKind::Log, "log", id);
  add(SignalKind::LogVariance, "log_variance", id);
  add(SignalKind::DualSeason, "dual_season_24_168",
      [](SignalSpec& s) { s.period = 24; s.period2 = 168; });
  add(SignalKind::DualSeason, "dual_season_7_30",
      [](SignalSpec& s) { s.period = 7; s.period2 = 30; });
  add(SignalKind::CosineGrowingAmplitude, "cosine_growing_24",
      [](SignalSpec& s) { s.period = 24; });
  add(SignalKind::CosineGrowingAmplitude, "cosine_growing_168",
      [](SignalSpec& s) { s.period = 168; });
  add(SignalKind::LinearNoise, "linear_noise_steep",
      [](SignalSpec& s) { s.slope = 0.05; s.noise_sd = 0.1; });

  std::vector<std::vector<double>> cols;
  std::vector<std::string> names;
  for (const auto& s : specs) {
    TimeSeriesFrame f = generate(s);
    cols.push_back(f.column(0));
    names.push_back(s.name);
  }
  std::vector<std::int64_t> ts(length);
  for (std::size_t i = 0; i < length; ++i) ts[i] = static_cast<std::int64_t>(i);
  return TimeSeriesFrame(std::move(cols), std::move(names), std::move(ts));
}

}  // namespace tsforge::synth
