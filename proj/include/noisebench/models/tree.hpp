#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "noisebench/models.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  int label = 0;  // leaf prediction

  bool is_leaf() const { return feature < 0; }
};

// Exact greedy CART on Gini impurity. Thresholds are midpoints between
// consecutive distinct values; samples with x[feature] < threshold go left.
// Ties break toward the lowest feature index, then the lowest threshold.
// Zero-gain splits are taken while the node is impure, so consistent
// training data always fits perfectly at unlimited depth.
// When rng is non-null each node examines a random mtry-subset of features
// (forest mode); otherwise every feature is examined.
std::vector<TreeNode> build_tree(const Matrix& X, const std::vector<int>& y,
                                 std::span<const std::size_t> sample_indices, int n_classes,
                                 const TreeParams& params, Rng* rng = nullptr,
                                 std::size_t mtry = 0);

int tree_predict_row(const std::vector<TreeNode>& nodes, std::span<const double> x);
int tree_depth(const std::vector<TreeNode>& nodes);
std::uint64_t tree_param_hash(std::uint64_t h, const std::vector<TreeNode>& nodes);

class TreeModel final : public TrainedModel {
 public:
  TreeModel(std::vector<TreeNode> nodes, std::size_t input_dim, int n_classes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const { return tree_depth(nodes_); }
  std::uint64_t param_hash() const override;

 protected:
  std::vector<int> do_predict(const Matrix& X) const override;

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace noisebench
