#pragma once

#include <memory>

#include "noisebench/models.hpp"

namespace noisebench {

// Brute-force Euclidean k-nearest neighbors. Neighbor selection orders by
// (squared distance, label), so predictions cannot depend on training-row
// order. Vote ties go to the tied class with the nearest member, then to
// the lowest label.
class KnnModel final : public TrainedModel {
 public:
  KnnModel(Matrix train_X, std::vector<int> train_y, int k, int n_classes);

  std::uint64_t param_hash() const override;

 protected:
  std::vector<int> do_predict(const Matrix& X) const override;

 private:
  Matrix train_X_;
  std::vector<int> train_y_;
  int k_;
};

std::unique_ptr<KnnModel> fit_knn(const KnnParams& params, const Matrix& X,
                                  const std::vector<int>& y, int n_classes);

}  // namespace noisebench
