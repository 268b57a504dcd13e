#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "noisebench/matrix.hpp"

namespace noisebench {

enum class SensorKind { Accelerometer, Gyroscope, Magnetometer };
enum class Axis { X, Y, Z };

std::string to_string(SensorKind kind);
std::string to_string(Axis axis);

// One physical sensor channel: body-worn unit x sensor x axis.
struct ChannelMeta {
  int tracker_unit = 1;  // 1-based
  SensorKind sensor_kind = SensorKind::Accelerometer;
  Axis axis = Axis::X;

  bool operator==(const ChannelMeta&) const = default;
};

// Channel layout convention: unit-major, then sensor kind (acc, gyro, mag),
// then axis (x, y, z). Column j of every segment maps to channels[j].
std::vector<ChannelMeta> standard_channel_layout(std::size_t n_channels);

// One fixed-length multi-channel recording; the unit of classification.
// samples is n_samples x n_channels (rows are time steps).
struct Segment {
  Matrix samples;
  int label = 0;          // class id, 1-based
  int subject = 0;        // participant id, 1-based
  int segment_index = 0;  // index within the (class, subject) cell, 1-based

  bool operator==(const Segment&) const = default;
};

struct Dataset {
  std::vector<Segment> segments;
  std::vector<ChannelMeta> channels;
  double sample_rate_hz = 25.0;
  int n_classes = 0;

  std::size_t n_channels() const { return channels.size(); }
  std::size_t n_samples() const {
    return segments.empty() ? 0 : segments.front().samples.rows();
  }

  bool operator==(const Dataset&) const = default;
};

// Expected tree dimensions for loading; defaults match the public
// 19-activity dataset (a01..a19 / p1..p8 / s01..s60.txt, 125 x 45 files).
struct ShapeConfig {
  int n_classes = 19;
  int n_subjects = 8;
  int segments_per_cell = 60;
  int n_samples = 125;
  int n_channels = 45;
};

// FNV-1a over every segment's sample bits, labels and shape, in dataset
// order. Reports record this so results are traceable to exact data.
std::uint64_t dataset_checksum(const Dataset& ds);

}  // namespace noisebench
