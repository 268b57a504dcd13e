#include "noisebench/models/gnb.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "noisebench/error.hpp"

namespace noisebench {

GnbModel::GnbModel(std::vector<double> log_priors, Matrix means, Matrix variances, int n_classes)
    : log_priors_(std::move(log_priors)), means_(std::move(means)), variances_(std::move(variances)) {
  family_ = ModelFamily::Gnb;
  input_dim_ = means_.cols();
  n_classes_ = n_classes;
}

std::uint64_t GnbModel::param_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto absorb_doubles = [&h](const double* p, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, &p[i], sizeof bits);
      h ^= bits;
      h *= 0x100000001B3ULL;
    }
  };
  absorb_doubles(log_priors_.data(), log_priors_.size());
  absorb_doubles(means_.data(), means_.rows() * means_.cols());
  absorb_doubles(variances_.data(), variances_.rows() * variances_.cols());
  return h;
}

std::vector<double> GnbModel::log_joint(std::span<const double> x) const {
  std::vector<double> scores(static_cast<std::size_t>(n_classes_));
  for (int c = 0; c < n_classes_; ++c) {
    auto mu = means_.row(static_cast<std::size_t>(c));
    auto var = variances_.row(static_cast<std::size_t>(c));
    double score = log_priors_[static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < x.size(); ++j) {
      double diff = x[j] - mu[j];
      score += -0.5 * (std::log(2.0 * std::numbers::pi * var[j]) + diff * diff / var[j]);
    }
    scores[static_cast<std::size_t>(c)] = score;
  }
  return scores;
}

std::vector<int> GnbModel::do_predict(const Matrix& X) const {
  std::vector<int> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    std::vector<double> scores = log_joint(X.row(i));
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c)
      if (scores[c] > scores[best]) best = c;  // ties keep the lowest label
    out[i] = static_cast<int>(best) + 1;
  }
  return out;
}

Matrix GnbModel::do_predict_proba(const Matrix& X) const {
  Matrix proba(X.rows(), static_cast<std::size_t>(n_classes_));
  for (std::size_t i = 0; i < X.rows(); ++i) {
    std::vector<double> scores = log_joint(X.row(i));
    double peak = *std::max_element(scores.begin(), scores.end());
    double total = 0.0;
    for (double s : scores) total += std::exp(s - peak);
    auto row = proba.row(i);
    for (std::size_t c = 0; c < scores.size(); ++c) row[c] = std::exp(scores[c] - peak) / total;
  }
  return proba;
}

std::unique_ptr<GnbModel> fit_gnb(const GnbParams& params, const Matrix& X,
                                  const std::vector<int>& y, int n_classes) {
  const std::size_t n = X.rows(), d = X.cols();
  const auto n_cls = static_cast<std::size_t>(n_classes);

  // Global per-feature variance fixes the scale of the floor.
  std::vector<double> global_mean(d, 0.0), global_var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = X.row(i);
    for (std::size_t j = 0; j < d; ++j) global_mean[j] += row[j];
  }
  for (double& m : global_mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = X.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      double diff = row[j] - global_mean[j];
      global_var[j] += diff * diff;
    }
  }
  double max_var = 0.0;
  for (double& v : global_var) {
    v /= static_cast<double>(n);
    max_var = std::max(max_var, v);
  }
  double floor = std::max(params.variance_floor_scale * max_var, 1e-300);

  std::vector<double> log_priors(n_cls);
  Matrix means(n_cls, d), variances(n_cls, d);
  std::vector<std::size_t> class_count(n_cls, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto cls = static_cast<std::size_t>(y[i] - 1);
    ++class_count[cls];
    auto row = X.row(i);
    for (std::size_t j = 0; j < d; ++j) means(cls, j) += row[j];
  }
  for (std::size_t c = 0; c < n_cls; ++c) {
    log_priors[c] = std::log(static_cast<double>(class_count[c]) / static_cast<double>(n));
    for (std::size_t j = 0; j < d; ++j) means(c, j) /= static_cast<double>(class_count[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto cls = static_cast<std::size_t>(y[i] - 1);
    auto row = X.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      double diff = row[j] - means(cls, j);
      variances(cls, j) += diff * diff;
    }
  }
  for (std::size_t c = 0; c < n_cls; ++c)
    for (std::size_t j = 0; j < d; ++j)
      variances(c, j) = std::max(variances(c, j) / static_cast<double>(class_count[c]), floor);

  return std::make_unique<GnbModel>(std::move(log_priors), std::move(means), std::move(variances),
                                    n_classes);
}

}  // namespace noisebench
