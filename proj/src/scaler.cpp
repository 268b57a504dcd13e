#include "noisebench/scaler.hpp"

#include <cmath>

#include "noisebench/error.hpp"

namespace noisebench {

namespace {
std::uint64_t hash_doubles(std::uint64_t h, const std::vector<double>& v) {
  for (double x : v) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof x);
    __builtin_memcpy(&bits, &x, sizeof bits);
    h ^= bits;
    h *= 0x100000001B3ULL;
  }
  return h;
}
}  // namespace

std::uint64_t Scaler::param_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  h = hash_doubles(h, means);
  h = hash_doubles(h, stds);
  return h;
}

Scaler scaler_fit(const Matrix& X) {
  if (X.rows() == 0) throw argument_error("scaler_fit: empty matrix");
  if (X.rows() < 2) throw argument_error("scaler_fit: need at least 2 rows");

  const std::size_t n = X.rows(), d = X.cols();
  Scaler s;
  s.means.assign(d, 0.0);
  s.stds.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = X.row(i);
    for (std::size_t j = 0; j < d; ++j) s.means[j] += row[j];
  }
  for (std::size_t j = 0; j < d; ++j) s.means[j] /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = X.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      double dx = row[j] - s.means[j];
      s.stds[j] += dx * dx;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    double sd = std::sqrt(s.stds[j] / static_cast<double>(n));
    s.stds[j] = sd > 0.0 ? sd : 1.0;  // constant feature: transforms to zero
  }
  return s;
}

Matrix scaler_apply(const Scaler& s, const Matrix& X) {
  Matrix out = X;
  scaler_apply_inplace(s, out);
  return out;
}

void scaler_apply_inplace(const Scaler& s, Matrix& X) {
  if (X.cols() != s.means.size())
    throw argument_error("scaler_apply: feature count mismatch");
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto row = X.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - s.means[j]) / s.stds[j];
  }
}

}  // namespace noisebench
