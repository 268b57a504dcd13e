#pragma once

#include <memory>

#include "noisebench/models/tree.hpp"

namespace noisebench {

class ForestModel final : public TrainedModel {
 public:
  ForestModel(std::vector<std::vector<TreeNode>> trees, std::size_t input_dim, int n_classes);

  std::size_t n_trees() const { return trees_.size(); }
  std::uint64_t param_hash() const override;

 protected:
  std::vector<int> do_predict(const Matrix& X) const override;
  Matrix do_predict_proba(const Matrix& X) const override;

 private:
  std::vector<std::vector<TreeNode>> trees_;
};

// Bootstrap-resampled trees with random feature subsets per split; tree t
// draws everything from its own stream seeded by (seed, t), so training
// order cannot change the fit.
std::unique_ptr<ForestModel> fit_forest(const ForestParams& params, std::uint64_t seed,
                                        const Matrix& X, const std::vector<int>& y, int n_classes);

}  // namespace noisebench
