#pragma once

#include <cstdint>
#include <vector>

#include "noisebench/matrix.hpp"

namespace noisebench {

enum class PcaSolver {
  Auto,      // Exact below the dimension threshold, Subspace above
  Exact,     // covariance + Householder tridiagonalization + implicit QL
  Subspace,  // matrix-free block orthogonal iteration with Rayleigh-Ritz
};

struct PcaConfig {
  double variance_target = 0.95;  // in (0, 1]
  PcaSolver solver = PcaSolver::Auto;
};

// Orthonormal principal directions of the training data, row per component,
// sorted by explained variance. Covariance uses 1/(n-1) normalization.
struct PcaModel {
  std::vector<double> mean;
  Matrix components;                            // retained_k x d, orthonormal rows
  std::vector<double> explained_variance_ratios;  // retained, non-increasing
  std::size_t retained_k = 0;

  std::uint64_t param_hash() const;
};

PcaModel pca_fit(const Matrix& X, const PcaConfig& cfg);
inline PcaModel pca_fit(const Matrix& X, double variance_target) {
  return pca_fit(X, PcaConfig{variance_target, PcaSolver::Auto});
}

// Projects rows: (x - mean) * components^T.
Matrix pca_apply(const PcaModel& m, const Matrix& X);
std::vector<double> pca_apply_row(const PcaModel& m, std::span<const double> x);

// Lifts projected rows back: y * components + mean. Test utility for
// reconstruction-error checks.
Matrix pca_reconstruct(const PcaModel& m, const Matrix& Y);

// Eigenpairs of a symmetric matrix (ascending eigenvalues, orthonormal
// column eigenvectors). Exposed for verification against the PCA paths.
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;  // column i pairs with values[i]
};
SymmetricEigen symmetric_eigen(Matrix a);

}  // namespace noisebench
