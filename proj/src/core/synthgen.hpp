#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frame.hpp"

namespace tsforge::synth {

enum class SignalKind {
  Linear,
  Constant,
  LinearNoise,
  Exponential,
  InverseExponential,
  Sine,
  Cosine,
  SineCosineOutliers,
  Square,
  TrendedWave,
  Log,
  LogVariance,
  DualSeason,
  CosineGrowingAmplitude,
};

struct SignalSpec {
  SignalKind kind = SignalKind::Constant;
  std::size_t length = 2000;
  std::size_t period = 24;
  std::size_t period2 = 168;  // DualSeason only
  double level = 10.0;
  double slope = 0.01;
  double amplitude = 1.0;
  double growth = 0.003;      // exponential kinds
  double noise_sd = 0.01;
  double outlier_rate = 0.02;
  double outlier_magnitude = 3.0;  // in units of amplitude
  std::uint64_t seed = 7;
  std::string name;  // column label; defaults to the kind name
};

// Deterministic under seed; pure arithmetic, no platform RNG.
TimeSeriesFrame generate(const SignalSpec& spec);

// The 21-series verification corpus: one frame, 21 columns, index timestamps.
TimeSeriesFrame corpus(std::size_t length = 2000, std::uint64_t seed = 7);

std::string kind_name(SignalKind kind);

}  // namespace tsforge::synth
