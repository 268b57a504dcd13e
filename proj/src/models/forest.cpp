#include "noisebench/models/forest.hpp"

#include <cmath>

#include "noisebench/error.hpp"

namespace noisebench {

ForestModel::ForestModel(std::vector<std::vector<TreeNode>> trees, std::size_t input_dim,
                         int n_classes)
    : trees_(std::move(trees)) {
  family_ = ModelFamily::Forest;
  input_dim_ = input_dim;
  n_classes_ = n_classes;
}

std::uint64_t ForestModel::param_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& tree : trees_) h = tree_param_hash(h, tree);
  return h;
}

std::vector<int> ForestModel::do_predict(const Matrix& X) const {
  Matrix proba = do_predict_proba(X);
  std::vector<int> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto row = proba.row(i);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c)
      if (row[c] > row[best]) best = c;  // ties keep the lowest label
    out[i] = static_cast<int>(best) + 1;
  }
  return out;
}

Matrix ForestModel::do_predict_proba(const Matrix& X) const {
  // Class probability = fraction of tree votes.
  Matrix proba(X.rows(), static_cast<std::size_t>(n_classes_));
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto x = X.row(i);
    auto row = proba.row(i);
    for (const auto& tree : trees_) row[static_cast<std::size_t>(tree_predict_row(tree, x)) - 1] += 1.0;
    for (double& p : row) p /= static_cast<double>(trees_.size());
  }
  return proba;
}

std::unique_ptr<ForestModel> fit_forest(const ForestParams& params, std::uint64_t seed,
                                        const Matrix& X, const std::vector<int>& y,
                                        int n_classes) {
  if (params.n_trees < 1) throw argument_error("forest: n_trees must be >= 1");
  const std::size_t n = X.rows(), d = X.cols();
  std::size_t mtry = params.features_per_split > 0
                         ? static_cast<std::size_t>(params.features_per_split)
                         : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  if (mtry > d) mtry = d;

  std::vector<std::vector<TreeNode>> trees(static_cast<std::size_t>(params.n_trees));
  for (std::size_t t = 0; t < trees.size(); ++t) {
    Rng rng(mix64_seq({seed, 0x464F'5245'5354ULL, t}));
    std::vector<std::size_t> samples(n);
    if (params.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) samples[i] = static_cast<std::size_t>(rng.next_below(n));
    } else {
      for (std::size_t i = 0; i < n; ++i) samples[i] = i;
    }
    trees[t] = build_tree(X, y, samples, n_classes, params.tree, &rng, mtry);
  }
  return std::make_unique<ForestModel>(std::move(trees), d, n_classes);
}

}  // namespace noisebench
