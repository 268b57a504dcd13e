#pragma once

#include <vector>

#include "noisebench/dataset.hpp"
#include "noisebench/matrix.hpp"

namespace noisebench {

enum class FeatureMode {
  Flatten,  // raw samples, channel-major: channel 0 in time order, then 1, ...
  Stats,    // per channel: mean, std, min, max, rms (in this order)
};

struct FeatureConfig {
  FeatureMode mode = FeatureMode::Flatten;

  std::size_t feature_count(std::size_t n_samples, std::size_t n_channels) const {
    return mode == FeatureMode::Flatten ? n_samples * n_channels : 5 * n_channels;
  }
};

std::vector<double> extract_features(const Segment& segment, const FeatureConfig& cfg);

// One row per segment, dataset order.
Matrix feature_matrix(const Dataset& ds, const FeatureConfig& cfg);

// Same, but only for the listed segment ordinals (row i <- segment indices[i]).
Matrix feature_matrix(const Dataset& ds, const FeatureConfig& cfg,
                      std::span<const std::size_t> indices);

std::vector<int> dataset_labels(const Dataset& ds);

}  // namespace noisebench
