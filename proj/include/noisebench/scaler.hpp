#pragma once

#include <cstdint>
#include <vector>

#include "noisebench/matrix.hpp"

namespace noisebench {

// Per-feature standardization fitted on training data only. Uses population
// std (1/n); zero-variance features store std 1 so they transform to zero.
struct Scaler {
  std::vector<double> means;
  std::vector<double> stds;

  std::uint64_t param_hash() const;
};

Scaler scaler_fit(const Matrix& X);
Matrix scaler_apply(const Scaler& s, const Matrix& X);
void scaler_apply_inplace(const Scaler& s, Matrix& X);

}  // namespace noisebench
