#include "tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsforge {

namespace {

std::vector<double> mean_of(const Matrix& y, const std::vector<std::size_t>& samples,
                            std::size_t begin, std::size_t end) {
  std::vector<double> m(y.cols(), 0.0);
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t o = 0; o < y.cols(); ++o) m[o] += y(samples[i], o);
  }
  const double inv = 1.0 / static_cast<double>(end - begin);
  for (double& v : m) v *= inv;
  return m;
}

}  // namespace

std::int32_t TreeEnsemble::grow(Tree& tree, const Matrix& x, const Matrix& y,
                                std::vector<std::size_t>& samples, std::size_t begin,
                                std::size_t end, std::size_t depth, const Params& params,
                                Rng& rng) const {
  const std::size_t n = end - begin;
  const std::size_t n_out = y.cols();

  Node node;
  node.value = mean_of(y, samples, begin, end);

  bool make_leaf = depth >= params.max_depth || n < params.min_samples_split;
  if (!make_leaf) {
    // parent SSE (summed over outputs)
    double parent_sse = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t o = 0; o < n_out; ++o) {
        const double dvo = y(samples[i], o) - node.value[o];
        parent_sse += dvo * dvo;
      }
    }
    if (parent_sse <= 1e-12) make_leaf = true;

    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    double best_sse = parent_sse;

    if (!make_leaf) {
      // per-tree feature subset of size ceil(sqrt(F))
      const std::size_t f_total = x.cols();
      const auto f_sub = static_cast<std::size_t>(
          std::ceil(std::sqrt(static_cast<double>(f_total))));
      std::vector<std::size_t> feats(f_total);
      std::iota(feats.begin(), feats.end(), 0);
      for (std::size_t i = 0; i < f_sub && i + 1 < f_total; ++i) {
        std::swap(feats[i], feats[i + rng.next_below(f_total - i)]);
      }
      feats.resize(std::min(f_sub, f_total));

      std::vector<std::size_t> order(samples.begin() + static_cast<std::ptrdiff_t>(begin),
                                     samples.begin() + static_cast<std::ptrdiff_t>(end));
      std::vector<double> left_sum(n_out), left_sq(n_out), total_sum(n_out), total_sq(n_out);
      for (std::size_t f : feats) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return x(a, f) < x(b, f) || (x(a, f) == x(b, f) && a < b);
        });
        std::fill(left_sum.begin(), left_sum.end(), 0.0);
        std::fill(left_sq.begin(), left_sq.end(), 0.0);
        std::fill(total_sum.begin(), total_sum.end(), 0.0);
        std::fill(total_sq.begin(), total_sq.end(), 0.0);
        for (std::size_t s : order) {
          for (std::size_t o = 0; o < n_out; ++o) {
            const double v = y(s, o);
            total_sum[o] += v;
            total_sq[o] += v * v;
          }
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
          const std::size_t s = order[i];
          for (std::size_t o = 0; o < n_out; ++o) {
            const double v = y(s, o);
            left_sum[o] += v;
            left_sq[o] += v * v;
          }
          const double a = x(s, f);
          const double b = x(order[i + 1], f);
          if (a == b) continue;
          const auto nl = static_cast<double>(i + 1);
          const auto nr = static_cast<double>(n - i - 1);
          double sse = 0.0;
          for (std::size_t o = 0; o < n_out; ++o) {
            const double rs = total_sum[o] - left_sum[o];
            const double rq = total_sq[o] - left_sq[o];
            sse += left_sq[o] - left_sum[o] * left_sum[o] / nl;
            sse += rq - rs * rs / nr;
          }
          if (sse < best_sse - 1e-12) {
            best_sse = sse;
            best_feature = static_cast<std::int32_t>(f);
            best_threshold = 0.5 * (a + b);
          }
        }
      }
      if (best_feature < 0) make_leaf = true;
      else {
        node.feature = best_feature;
        node.threshold = best_threshold;
      }
    }

    if (!make_leaf) {
      const auto mid_it = std::stable_partition(
          samples.begin() + static_cast<std::ptrdiff_t>(begin),
          samples.begin() + static_cast<std::ptrdiff_t>(end),
          [&](std::size_t s) { return x(s, static_cast<std::size_t>(node.feature)) <= node.threshold; });
      const auto mid = static_cast<std::size_t>(mid_it - samples.begin());
      if (mid == begin || mid == end) {
        make_leaf = true;
        node.feature = -1;
      } else {
        const auto idx = static_cast<std::int32_t>(tree.size());
        tree.push_back(node);
        const std::int32_t left = grow(tree, x, y, samples, begin, mid, depth + 1, params, rng);
        const std::int32_t right = grow(tree, x, y, samples, mid, end, depth + 1, params, rng);
        tree[static_cast<std::size_t>(idx)].left = left;
        tree[static_cast<std::size_t>(idx)].right = right;
        return idx;
      }
    }
  }

  node.feature = -1;
  const auto idx = static_cast<std::int32_t>(tree.size());
  tree.push_back(node);
  return idx;
}

void TreeEnsemble::fit(const Matrix& x, const Matrix& y, const Params& params) {
  if (x.rows() == 0 || x.cols() == 0) throw TsError("tree_ensemble: degenerate design matrix");
  if (x.rows() != y.rows()) throw TsError("tree_ensemble: X/y row mismatch");
  n_features_ = x.cols();
  n_outputs_ = y.cols();
  trees_.clear();
  trees_.reserve(params.n_trees);
  const std::size_t n = x.rows();
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(params.seed * 0x9e3779b97f4a7c15ULL + t);
    std::vector<std::size_t> samples(n);
    for (std::size_t i = 0; i < n; ++i) samples[i] = rng.next_below(n);  // bootstrap
    Tree tree;
    grow(tree, x, y, samples, 0, n, 0, params, rng);
    trees_.push_back(std::move(tree));
  }
}

std::vector<double> TreeEnsemble::predict_row(const std::vector<double>& features) const {
  if (trees_.empty()) throw TsError("tree_ensemble: predict before fit");
  if (features.size() != n_features_) throw TsError("tree_ensemble: feature count mismatch");
  std::vector<double> out(n_outputs_, 0.0);
  for (const Tree& tree : trees_) {
    std::size_t node = 0;  // root is the first pushed internal node or leaf
    // Root index: grow() pushes internal nodes pre-order, so index 0 is the root.
    for (;;) {
      const Node& nd = tree[node];
      if (nd.feature < 0) {
        for (std::size_t o = 0; o < n_outputs_; ++o) out[o] += nd.value[o];
        break;
      }
      node = static_cast<std::size_t>(
          features[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
    }
  }
  const double inv = 1.0 / static_cast<double>(trees_.size());
  for (double& v : out) v *= inv;
  return out;
}

Matrix TreeEnsemble::predict(const Matrix& x) const {
  Matrix out(x.rows(), n_outputs_);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::vector<double> p = predict_row(x.row(r));
    for (std::size_t o = 0; o < n_outputs_; ++o) out(r, o) = p[o];
  }
  return out;
}

nlohmann::json TreeEnsemble::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& tree : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const Node& nd : tree) {
      nodes.push_back({{"f", nd.feature},
                       {"t", nd.threshold},
                       {"l", nd.left},
                       {"r", nd.right},
                       {"v", nd.value}});
    }
    trees.push_back(std::move(nodes));
  }
  return {{"n_features", n_features_}, {"n_outputs", n_outputs_}, {"trees", trees}};
}

void TreeEnsemble::load(const nlohmann::json& j) {
  n_features_ = j.at("n_features").get<std::size_t>();
  n_outputs_ = j.at("n_outputs").get<std::size_t>();
  trees_.clear();
  for (const auto& jt : j.at("trees")) {
    Tree tree;
    for (const auto& jn : jt) {
      Node nd;
      nd.feature = jn.at("f").get<std::int32_t>();
      nd.threshold = jn.at("t").get<double>();
      nd.left = jn.at("l").get<std::int32_t>();
      nd.right = jn.at("r").get<std::int32_t>();
      nd.value = jn.at("v").get<std::vector<double>>();
      tree.push_back(std::move(nd));
    }
    trees_.push_back(std::move(tree));
  }
}

}  // namespace tsforge
