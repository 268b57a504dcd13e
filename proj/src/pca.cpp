#include "noisebench/pca.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "noisebench/error.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

namespace {

constexpr std::size_t kExactDimLimit = 768;
constexpr double kRankTolerance = 1e-12;

// Householder reduction of a symmetric matrix to tridiagonal form.
// On return `a` holds the accumulated orthogonal transform, `diag` the
// diagonal and `off` the sub-diagonal (off[0] unused).
void tridiagonalize(Matrix& a, std::vector<double>& diag, std::vector<double>& off) {
  const std::size_t n = a.rows();
  diag.assign(n, 0.0);
  off.assign(n, 0.0);

  for (std::size_t i = n - 1; i >= 1; --i) {
    std::size_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(a(i, k));
      if (scale == 0.0) {
        off[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        off[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          a(j, i) = a(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          off[j] = g / h;
          f += off[j] * a(i, j);
        }
        double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          off[j] = g = off[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) a(j, k) -= f * off[k] + g * a(i, k);
        }
      }
    } else {
      off[i] = a(i, l);
    }
    diag[i] = h;
  }
  diag[0] = 0.0;
  off[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diag[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += a(i, k) * a(k, j);
        for (std::size_t k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
      }
    }
    diag[i] = a(i, i);
    a(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
  }
}

// Implicit-shift QL on a tridiagonal matrix, accumulating rotations into z.
// diag becomes the eigenvalues; columns of z the eigenvectors.
void tridiagonal_ql(std::vector<double>& diag, std::vector<double>& off, Matrix& z) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) off[i - 1] = off[i];
  off[n - 1] = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        double dd = std::fabs(diag[m]) + std::fabs(diag[m + 1]);
        if (std::fabs(off[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iterations++ == 64) throw argument_error("pca: eigensolver failed to converge");
        double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
        double r = std::hypot(g, 1.0);
        g = diag[m] - diag[l] + off[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (std::size_t i = m; i-- > l;) {
          double f = s * off[i];
          double b = c * off[i];
          r = std::hypot(f, g);
          off[i + 1] = r;
          if (r == 0.0) {
            diag[i + 1] -= p;
            off[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = diag[i + 1] - p;
          r = (diag[i] - g) * s + 2.0 * c * b;
          p = s * r;
          diag[i + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && m - l > 1) continue;
        diag[l] -= p;
        off[l] = g;
        off[m] = 0.0;
      }
    } while (m != l);
  }
}

std::vector<double> column_means(const Matrix& X) {
  std::vector<double> mean(X.cols(), 0.0);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto row = X.row(i);
    for (std::size_t j = 0; j < X.cols(); ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= static_cast<double>(X.rows());
  return mean;
}

Matrix centered(const Matrix& X, const std::vector<double>& mean) {
  Matrix out = X;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < out.cols(); ++j) row[j] -= mean[j];
  }
  return out;
}

// Selects retained_k and fills the model from eigenpairs sorted descending.
void retain_components(PcaModel& model, const std::vector<double>& lambdas_desc,
                       const Matrix& vectors_desc_rows, double total_variance, double target) {
  const double lambda_max = lambdas_desc.empty() ? 0.0 : std::max(lambdas_desc[0], 0.0);
  std::size_t available = 0;
  for (double lambda : lambdas_desc) {
    if (lambda <= lambda_max * kRankTolerance || lambda <= 0.0) break;
    ++available;
  }
  if (available == 0) throw argument_error("pca_fit: degenerate rank-0 input");

  double cumulative = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < available; ++i) {
    cumulative += lambdas_desc[i] / total_variance;
    k = i + 1;
    if (cumulative >= target - 1e-12) break;
  }

  model.retained_k = k;
  model.components = Matrix(k, vectors_desc_rows.cols());
  model.explained_variance_ratios.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto src = vectors_desc_rows.row(i);
    auto dst = model.components.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
    model.explained_variance_ratios[i] = std::clamp(lambdas_desc[i] / total_variance, 0.0, 1.0);
  }
}

PcaModel fit_exact(const Matrix& X, const std::vector<double>& mean, double target) {
  const std::size_t n = X.rows(), d = X.cols();
  Matrix Xc = centered(X, mean);

  Matrix cov(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = Xc.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      double va = row[a];
      if (va == 0.0) continue;
      auto* cov_row = &cov(a, 0);
      for (std::size_t b = a; b < d; ++b) cov_row[b] += va * row[b];
    }
  }
  double norm = 1.0 / static_cast<double>(n - 1);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) cov(b, a) = cov(a, b) = cov(a, b) * norm;

  double total_variance = 0.0;
  for (std::size_t a = 0; a < d; ++a) total_variance += cov(a, a);
  if (total_variance <= 0.0) throw argument_error("pca_fit: degenerate rank-0 input");

  SymmetricEigen eig = symmetric_eigen(std::move(cov));

  // Ascending to descending.
  std::vector<double> lambdas(d);
  Matrix vectors(d, d);  // row per component
  for (std::size_t i = 0; i < d; ++i) {
    std::size_t src = d - 1 - i;
    lambdas[i] = eig.values[src];
    for (std::size_t j = 0; j < d; ++j) vectors(i, j) = eig.vectors(j, src);
  }

  PcaModel model;
  model.mean = mean;
  retain_components(model, lambdas, vectors, total_variance, target);
  return model;
}

// --- subspace path -----------------------------------------------------

// B = Xc * Q, with Q given as rows of Qt (m x d). Returns n x m.
Matrix times_qt(const Matrix& Xc, const Matrix& Qt) {
  const std::size_t n = Xc.rows(), d = Xc.cols(), m = Qt.rows();
  Matrix B(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = Xc.row(i);
    auto out = B.row(i);
    for (std::size_t c = 0; c < m; ++c) {
      auto q = Qt.row(c);
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += x[j] * q[j];
      out[c] = acc;
    }
  }
  return B;
}

// Z = (Xc^T * B)^T / (n-1)  ->  rows are covariance-multiplied directions.
Matrix cov_times(const Matrix& Xc, const Matrix& B) {
  const std::size_t n = Xc.rows(), d = Xc.cols(), m = B.cols();
  Matrix Zt(m, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = Xc.row(i);
    auto b = B.row(i);
    for (std::size_t c = 0; c < m; ++c) {
      double scale = b[c];
      if (scale == 0.0) continue;
      auto z = Zt.row(c);
      for (std::size_t j = 0; j < d; ++j) z[j] += scale * x[j];
    }
  }
  double norm = 1.0 / static_cast<double>(n - 1);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t j = 0; j < d; ++j) Zt(c, j) *= norm;
  return Zt;
}

// Modified Gram-Schmidt on rows, two passes. Rows that collapse to zero get
// re-seeded from the rng so the block keeps full rank.
void orthonormalize_rows(Matrix& Qt, Rng& rng) {
  const std::size_t m = Qt.rows(), d = Qt.cols();
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < m; ++i) {
      auto qi = Qt.row(i);
      for (std::size_t p = 0; p < i; ++p) {
        auto qp = Qt.row(p);
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) dot += qi[j] * qp[j];
        for (std::size_t j = 0; j < d; ++j) qi[j] -= dot * qp[j];
      }
      double norm = 0.0;
      for (std::size_t j = 0; j < d; ++j) norm += qi[j] * qi[j];
      norm = std::sqrt(norm);
      if (norm < 1e-150) {
        for (std::size_t j = 0; j < d; ++j) qi[j] = rng.next_gaussian();
        double n2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) n2 += qi[j] * qi[j];
        norm = std::sqrt(n2);
      }
      for (std::size_t j = 0; j < d; ++j) qi[j] /= norm;
    }
  }
}

PcaModel fit_subspace(const Matrix& X, const std::vector<double>& mean, double target) {
  const std::size_t n = X.rows(), d = X.cols();
  Matrix Xc = centered(X, mean);

  double total_variance = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = Xc.row(i);
    for (std::size_t j = 0; j < d; ++j) total_variance += row[j] * row[j];
  }
  total_variance /= static_cast<double>(n - 1);
  if (total_variance <= 0.0) throw argument_error("pca_fit: degenerate rank-0 input");

  const std::size_t rank_cap = std::min(n - 1, d);
  std::size_t block = std::min<std::size_t>(rank_cap, 64);

  Rng rng(mix64_seq({0x7043'4153'5542'5350ULL, n, d}));
  Matrix Qt(block, d);
  for (std::size_t i = 0; i < block; ++i)
    for (std::size_t j = 0; j < d; ++j) Qt(i, j) = rng.next_gaussian();
  orthonormalize_rows(Qt, rng);

  std::vector<double> ritz;       // descending eigenvalue estimates
  Matrix directions;              // rows aligned with ritz
  constexpr int kMaxSweeps = 400;
  constexpr double kTol = 1e-10;

  for (;;) {
    const std::size_t m = Qt.rows();
    std::vector<double> prev;
    int stable = 0;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      Matrix B = times_qt(Xc, Qt);      // n x m
      Matrix Zt = cov_times(Xc, B);     // m x d, rows = C * q_i

      // Rayleigh-Ritz on the current block.
      Matrix T(m, m);
      for (std::size_t a = 0; a < m; ++a) {
        auto za = Zt.row(a);
        for (std::size_t b = a; b < m; ++b) {
          auto qb = Qt.row(b);
          double acc = 0.0;
          for (std::size_t j = 0; j < d; ++j) acc += za[j] * qb[j];
          T(a, b) = T(b, a) = acc;
        }
      }
      SymmetricEigen small = symmetric_eigen(std::move(T));

      // Rotate the block onto Ritz directions, descending.
      Matrix rotated(m, d);
      std::vector<double> theta(m);
      for (std::size_t r = 0; r < m; ++r) {
        std::size_t src = m - 1 - r;
        theta[r] = small.values[src];
        auto out = rotated.row(r);
        for (std::size_t a = 0; a < m; ++a) {
          double w = small.vectors(a, src);
          if (w == 0.0) continue;
          auto z = Zt.row(a);
          for (std::size_t j = 0; j < d; ++j) out[j] += w * z[j];
        }
      }
      orthonormalize_rows(rotated, rng);
      Qt = std::move(rotated);

      // Converged when the Ritz values needed for the target stop moving.
      bool close = !prev.empty();
      if (close) {
        double cum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          double rel = std::fabs(theta[i] - prev[i]) /
                       std::max(std::fabs(theta[i]), total_variance * 1e-15);
          if (rel > kTol) {
            close = false;
            break;
          }
          cum += std::max(theta[i], 0.0) / total_variance;
          if (cum >= target - 1e-12) break;  // deeper components not needed
        }
      }
      prev = theta;
      if (close && ++stable >= 2) break;
      if (!close) stable = 0;
    }

    ritz = prev;
    directions = Qt;

    double cum = 0.0;
    for (double t : ritz) cum += std::max(t, 0.0) / total_variance;
    if (cum >= target - 1e-12 || m >= rank_cap) break;

    // Not enough variance in this block: grow it and keep iterating.
    std::size_t grown = std::min(rank_cap, m * 2);
    Matrix bigger(grown, d);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < d; ++j) bigger(i, j) = Qt(i, j);
    for (std::size_t i = m; i < grown; ++i)
      for (std::size_t j = 0; j < d; ++j) bigger(i, j) = rng.next_gaussian();
    orthonormalize_rows(bigger, rng);
    Qt = std::move(bigger);
  }

  PcaModel model;
  model.mean = mean;
  retain_components(model, ritz, directions, total_variance, target);
  return model;
}

}  // namespace

SymmetricEigen symmetric_eigen(Matrix a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw argument_error("symmetric_eigen: matrix must be square and non-empty");
  SymmetricEigen out;
  if (a.rows() == 1) {
    out.values = {a(0, 0)};
    out.vectors = Matrix(1, 1, 1.0);
    return out;
  }
  std::vector<double> off;
  tridiagonalize(a, out.values, off);
  tridiagonal_ql(out.values, off, a);
  out.vectors = std::move(a);

  // Sort ascending, permuting eigenvector columns to match.
  const std::size_t n = out.values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return out.values[x] < out.values[y]; });
  std::vector<double> sorted_values(n);
  Matrix sorted_vectors(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    sorted_values[i] = out.values[order[i]];
    for (std::size_t r = 0; r < n; ++r) sorted_vectors(r, i) = out.vectors(r, order[i]);
  }
  out.values = std::move(sorted_values);
  out.vectors = std::move(sorted_vectors);
  return out;
}

std::uint64_t PcaModel::param_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto absorb = [&h](const double* p, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, &p[i], sizeof bits);
      h ^= bits;
      h *= 0x100000001B3ULL;
    }
  };
  absorb(mean.data(), mean.size());
  absorb(components.data(), components.rows() * components.cols());
  absorb(explained_variance_ratios.data(), explained_variance_ratios.size());
  h ^= retained_k;
  h *= 0x100000001B3ULL;
  return h;
}

PcaModel pca_fit(const Matrix& X, const PcaConfig& cfg) {
  if (!(cfg.variance_target > 0.0) || cfg.variance_target > 1.0)
    throw argument_error("pca_fit: variance_target must be in (0, 1]");
  if (X.rows() < 2) throw argument_error("pca_fit: need at least 2 rows");
  if (X.cols() == 0) throw argument_error("pca_fit: no features");

  std::vector<double> mean = column_means(X);
  PcaSolver solver = cfg.solver;
  if (solver == PcaSolver::Auto)
    solver = X.cols() <= kExactDimLimit ? PcaSolver::Exact : PcaSolver::Subspace;
  return solver == PcaSolver::Exact ? fit_exact(X, mean, cfg.variance_target)
                                    : fit_subspace(X, mean, cfg.variance_target);
}

Matrix pca_apply(const PcaModel& m, const Matrix& X) {
  if (X.cols() != m.mean.size()) throw argument_error("pca_apply: feature count mismatch");
  const std::size_t n = X.rows(), d = X.cols(), k = m.retained_k;
  Matrix out(n, k);
  std::vector<double> buffer(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = X.row(i);
    for (std::size_t j = 0; j < d; ++j) buffer[j] = x[j] - m.mean[j];
    auto y = out.row(i);
    for (std::size_t c = 0; c < k; ++c) {
      auto w = m.components.row(c);
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += w[j] * buffer[j];
      y[c] = acc;
    }
  }
  return out;
}

std::vector<double> pca_apply_row(const PcaModel& m, std::span<const double> x) {
  if (x.size() != m.mean.size()) throw argument_error("pca_apply: feature count mismatch");
  std::vector<double> out(m.retained_k, 0.0);
  for (std::size_t c = 0; c < m.retained_k; ++c) {
    auto w = m.components.row(c);
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += w[j] * (x[j] - m.mean[j]);
    out[c] = acc;
  }
  return out;
}

Matrix pca_reconstruct(const PcaModel& m, const Matrix& Y) {
  if (Y.cols() != m.retained_k) throw argument_error("pca_reconstruct: component count mismatch");
  const std::size_t n = Y.rows(), d = m.mean.size();
  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto y = Y.row(i);
    auto x = out.row(i);
    for (std::size_t j = 0; j < d; ++j) x[j] = m.mean[j];
    for (std::size_t c = 0; c < m.retained_k; ++c) {
      double scale = y[c];
      if (scale == 0.0) continue;
      auto w = m.components.row(c);
      for (std::size_t j = 0; j < d; ++j) x[j] += scale * w[j];
    }
  }
  return out;
}

}  // namespace noisebench
