#pragma once

#include <memory>

#include "noisebench/models.hpp"

namespace noisebench {

// Gaussian naive Bayes with per-class feature means/variances (population
// normalization) and empirical class priors. Every stored variance is
// floored at variance_floor_scale times the largest global feature variance
// (plus a tiny absolute guard so fully constant data stays finite).
class GnbModel final : public TrainedModel {
 public:
  GnbModel(std::vector<double> log_priors, Matrix means, Matrix variances, int n_classes);

  const Matrix& class_means() const { return means_; }
  const Matrix& class_variances() const { return variances_; }
  std::uint64_t param_hash() const override;

 protected:
  std::vector<int> do_predict(const Matrix& X) const override;
  Matrix do_predict_proba(const Matrix& X) const override;

 private:
  // Per-row log prior + sum of per-feature Gaussian log densities.
  std::vector<double> log_joint(std::span<const double> x) const;

  std::vector<double> log_priors_;
  Matrix means_;      // n_classes x d
  Matrix variances_;  // n_classes x d, floored
};

std::unique_ptr<GnbModel> fit_gnb(const GnbParams& params, const Matrix& X,
                                  const std::vector<int>& y, int n_classes);

}  // namespace noisebench
