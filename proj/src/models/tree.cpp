#include "noisebench/models/tree.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <numeric>

#include "noisebench/error.hpp"

namespace noisebench {

namespace {

int majority_label(const std::vector<std::int64_t>& counts) {
  int best = 1;
  std::int64_t best_count = -1;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > best_count) {  // strict: ties keep the lowest label
      best_count = counts[c];
      best = static_cast<int>(c);
    }
  }
  return best;
}

struct SplitCandidate {
  double score = -std::numeric_limits<double>::infinity();
  int feature = -1;
  double threshold = 0.0;
};

}  // namespace

std::vector<TreeNode> build_tree(const Matrix& X, const std::vector<int>& y,
                                 std::span<const std::size_t> sample_indices, int n_classes,
                                 const TreeParams& params, Rng* rng, std::size_t mtry) {
  const std::size_t d = X.cols();
  std::vector<TreeNode> nodes;

  struct WorkItem {
    std::int32_t node;
    std::vector<std::size_t> samples;
    int depth;
  };
  std::vector<WorkItem> stack;
  nodes.emplace_back();
  stack.push_back({0, {sample_indices.begin(), sample_indices.end()}, 0});

  std::vector<std::size_t> feature_pool(d);
  std::iota(feature_pool.begin(), feature_pool.end(), 0);
  std::vector<std::size_t> sorted;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_classes) + 1);
  std::vector<std::int64_t> left_counts(static_cast<std::size_t>(n_classes) + 1);
  std::vector<std::int64_t> right_counts(static_cast<std::size_t>(n_classes) + 1);

  while (!stack.empty()) {
    WorkItem item = std::move(stack.back());
    stack.pop_back();
    const std::size_t n = item.samples.size();

    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t s : item.samples) ++counts[static_cast<std::size_t>(y[s])];
    bool pure = false;
    for (std::int64_t c : counts)
      if (c == static_cast<std::int64_t>(n)) pure = true;

    TreeNode& node_ref = nodes[static_cast<std::size_t>(item.node)];
    if (pure || n < static_cast<std::size_t>(params.min_samples_split) ||
        (params.max_depth > 0 && item.depth >= params.max_depth)) {
      node_ref.label = majority_label(counts);
      continue;
    }

    // Feature set for this node: everything, or a seeded random subset.
    std::span<const std::size_t> features(feature_pool);
    std::vector<std::size_t> subset;
    if (rng != nullptr && mtry > 0 && mtry < d) {
      subset = feature_pool;
      for (std::size_t i = 0; i < mtry; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng->next_below(subset.size() - i));
        std::swap(subset[i], subset[j]);
      }
      subset.resize(mtry);
      std::sort(subset.begin(), subset.end());
      features = subset;
    }

    SplitCandidate best;
    for (std::size_t f : features) {
      sorted = item.samples;
      std::sort(sorted.begin(), sorted.end(),
                [&](std::size_t a, std::size_t b) { return X(a, f) < X(b, f); });
      if (X(sorted.front(), f) == X(sorted.back(), f)) continue;  // constant here

      std::fill(left_counts.begin(), left_counts.end(), 0);
      right_counts = counts;
      // Maximizing sum of per-side (sum of squared class counts / size) is
      // equivalent to minimizing weighted Gini; integer state keeps the
      // scan exact, so ties are exact too.
      std::int64_t sumsq_left = 0;
      std::int64_t sumsq_right = 0;
      for (std::int64_t c : counts) sumsq_right += c * c;

      for (std::size_t i = 0; i + 1 < n; ++i) {
        auto cls = static_cast<std::size_t>(y[sorted[i]]);
        sumsq_left += 2 * left_counts[cls] + 1;
        sumsq_right += -2 * right_counts[cls] + 1;
        ++left_counts[cls];
        --right_counts[cls];

        double lo = X(sorted[i], f);
        double hi = X(sorted[i + 1], f);
        if (lo == hi) continue;

        double n_left = static_cast<double>(i + 1);
        double score = static_cast<double>(sumsq_left) / n_left +
                       static_cast<double>(sumsq_right) / (static_cast<double>(n) - n_left);
        if (score > best.score) {
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid > lo)) mid = hi;  // adjacent floats: keep both sides non-empty
          best = {score, static_cast<int>(f), mid};
        }
      }
    }

    if (best.feature < 0) {
      node_ref.label = majority_label(counts);
      continue;
    }

    auto middle = std::partition(item.samples.begin(), item.samples.end(),
                                 [&](std::size_t s) { return X(s, best.feature) < best.threshold; });
    std::vector<std::size_t> left_samples(item.samples.begin(), middle);
    std::vector<std::size_t> right_samples(middle, item.samples.end());

    auto left_index = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();
    auto right_index = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();

    TreeNode& parent = nodes[static_cast<std::size_t>(item.node)];
    parent.feature = best.feature;
    parent.threshold = best.threshold;
    parent.left = left_index;
    parent.right = right_index;

    // Right pushed first so the left child builds next (fixed LIFO order;
    // forest feature sampling depends on traversal order being stable).
    stack.push_back({right_index, std::move(right_samples), item.depth + 1});
    stack.push_back({left_index, std::move(left_samples), item.depth + 1});
  }
  return nodes;
}

int tree_predict_row(const std::vector<TreeNode>& nodes, std::span<const double> x) {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& node = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] < node.threshold
                                     ? node.left
                                     : node.right);
  }
  return nodes[i].label;
}

int tree_depth(const std::vector<TreeNode>& nodes) {
  if (nodes.empty()) return 0;
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  int depth = 0;
  while (!stack.empty()) {
    auto [i, level] = stack.back();
    stack.pop_back();
    depth = std::max(depth, level);
    if (!nodes[i].is_leaf()) {
      stack.push_back({static_cast<std::size_t>(nodes[i].left), level + 1});
      stack.push_back({static_cast<std::size_t>(nodes[i].right), level + 1});
    }
  }
  return depth;
}

std::uint64_t tree_param_hash(std::uint64_t h, const std::vector<TreeNode>& nodes) {
  auto absorb = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001B3ULL;
  };
  for (const TreeNode& node : nodes) {
    absorb(static_cast<std::uint64_t>(static_cast<std::int64_t>(node.feature)));
    std::uint64_t bits;
    std::memcpy(&bits, &node.threshold, sizeof bits);
    absorb(bits);
    absorb(static_cast<std::uint64_t>(static_cast<std::int64_t>(node.left)));
    absorb(static_cast<std::uint64_t>(static_cast<std::int64_t>(node.right)));
    absorb(static_cast<std::uint64_t>(node.label));
  }
  return h;
}

TreeModel::TreeModel(std::vector<TreeNode> nodes, std::size_t input_dim, int n_classes)
    : nodes_(std::move(nodes)) {
  family_ = ModelFamily::Tree;
  input_dim_ = input_dim;
  n_classes_ = n_classes;
}

std::uint64_t TreeModel::param_hash() const {
  return tree_param_hash(0xCBF29CE484222325ULL, nodes_);
}

std::vector<int> TreeModel::do_predict(const Matrix& X) const {
  std::vector<int> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = tree_predict_row(nodes_, X.row(i));
  return out;
}

}  // namespace noisebench
