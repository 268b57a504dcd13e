#include "noisebench/features.hpp"

#include <algorithm>
#include <cmath>

#include "noisebench/error.hpp"

namespace noisebench {

std::vector<double> extract_features(const Segment& segment, const FeatureConfig& cfg) {
  const Matrix& m = segment.samples;
  const std::size_t n_samples = m.rows();
  const std::size_t n_channels = m.cols();

  std::vector<double> out;
  if (cfg.mode == FeatureMode::Flatten) {
    out.reserve(n_samples * n_channels);
    for (std::size_t j = 0; j < n_channels; ++j)
      for (std::size_t t = 0; t < n_samples; ++t) out.push_back(m(t, j));
    return out;
  }

  out.reserve(5 * n_channels);
  for (std::size_t j = 0; j < n_channels; ++j) {
    double mean = 0.0, lo = m(0, j), hi = m(0, j), sumsq = 0.0;
    for (std::size_t t = 0; t < n_samples; ++t) {
      double x = m(t, j);
      mean += x;
      sumsq += x * x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    mean /= static_cast<double>(n_samples);
    double var = sumsq / static_cast<double>(n_samples) - mean * mean;
    if (var < 0.0) var = 0.0;  // rounding
    out.push_back(mean);
    out.push_back(std::sqrt(var));
    out.push_back(lo);
    out.push_back(hi);
    out.push_back(std::sqrt(sumsq / static_cast<double>(n_samples)));
  }
  return out;
}

Matrix feature_matrix(const Dataset& ds, const FeatureConfig& cfg) {
  std::vector<std::size_t> all(ds.segments.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return feature_matrix(ds, cfg, all);
}

Matrix feature_matrix(const Dataset& ds, const FeatureConfig& cfg,
                      std::span<const std::size_t> indices) {
  if (ds.segments.empty()) throw argument_error("feature_matrix: empty dataset");
  const std::size_t d = cfg.feature_count(ds.n_samples(), ds.n_channels());
  Matrix X(indices.size(), d);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    std::vector<double> f = extract_features(ds.segments[indices[i]], cfg);
    auto row = X.row(i);
    std::copy(f.begin(), f.end(), row.begin());
  }
  return X;
}

std::vector<int> dataset_labels(const Dataset& ds) {
  std::vector<int> y;
  y.reserve(ds.segments.size());
  for (const auto& seg : ds.segments) y.push_back(seg.label);
  return y;
}

}  // namespace noisebench
