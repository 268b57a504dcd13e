#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "noisebench/dataset.hpp"

namespace noisebench {

// Loads the a##/p#/s##.txt tree (comma-separated, n_samples rows x
// n_channels columns per file). Segments come back ordered by
// (class, subject, segment_index) regardless of load scheduling.
// Throws Structure on missing paths, Parse on malformed rows, Validation
// on non-finite values.
Dataset load_activity_dataset(const std::filesystem::path& root, const ShapeConfig& expected,
                              unsigned jobs = 1);

// Writes a dataset back out in the same tree layout (cmd_synth uses this).
void write_dataset(const Dataset& ds, const std::filesystem::path& root,
                   const ShapeConfig& shape);

struct ValidationCheck {
  std::string name;
  bool passed = true;
  bool warning_only = false;
  std::vector<std::string> findings;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed && !c.warning_only) return false;
    return true;
  }
  bool has_warnings() const {
    for (const auto& c : checks)
      if (!c.passed && c.warning_only) return true;
    return false;
  }
};

// Checks finiteness, shape uniformity, label coverage and bitwise-duplicate
// segments (duplicates are warnings). Never throws; findings go in the report.
ValidationReport validate_dataset(const Dataset& ds);

struct SynthSpec {
  int n_classes = 4;
  int n_subjects = 2;
  int segments_per_cell = 25;
  int n_channels = 9;
  int n_samples = 50;
  double sample_rate_hz = 25.0;
};

// Deterministic sinusoid-plus-jitter generator. Per (class, channel) the
// seeded generator draws amplitude, phase and offset once; the frequency is
// drawn once per class from a class-separated band, so a KNN baseline
// separates classes essentially perfectly. Test fallback for when the
// public dataset is not on disk.
Dataset synth_dataset(const SynthSpec& spec, std::uint64_t seed);

}  // namespace noisebench
