#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "matrix.hpp"

namespace tsforge {

// Bagged multi-output regression trees: variance-reduction splits, bootstrap
// sample per tree, √(features) feature subsampling, prediction = mean over
// trees. Deterministic for a fixed seed.
class TreeEnsemble {
 public:
  struct Params {
    std::size_t n_trees = 50;
    std::size_t max_depth = 6;
    std::size_t min_samples_split = 2;
    std::uint64_t seed = 0;
  };

  void fit(const Matrix& x, const Matrix& y, const Params& params);
  std::vector<double> predict_row(const std::vector<double>& features) const;
  Matrix predict(const Matrix& x) const;
  bool fitted() const { return !trees_.empty(); }
  std::size_t outputs() const { return n_outputs_; }

  nlohmann::json to_json() const;
  void load(const nlohmann::json& j);

 private:
  struct Node {
    std::int32_t feature = -1;  // -1 = leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<double> value;  // leaf mean per output
  };
  using Tree = std::vector<Node>;

  std::int32_t grow(Tree& tree, const Matrix& x, const Matrix& y,
                    std::vector<std::size_t>& samples, std::size_t begin, std::size_t end,
                    std::size_t depth, const Params& params, Rng& rng) const;

  std::vector<Tree> trees_;
  std::size_t n_features_ = 0;
  std::size_t n_outputs_ = 0;
};

}  // namespace tsforge
