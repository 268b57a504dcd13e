#include "noisebench/dataset.hpp"

namespace noisebench {

std::string to_string(SensorKind kind) {
  switch (kind) {
    case SensorKind::Accelerometer: return "acc";
    case SensorKind::Gyroscope: return "gyro";
    case SensorKind::Magnetometer: return "mag";
  }
  return "?";
}

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

std::vector<ChannelMeta> standard_channel_layout(std::size_t n_channels) {
  std::vector<ChannelMeta> out;
  out.reserve(n_channels);
  for (std::size_t j = 0; j < n_channels; ++j) {
    ChannelMeta meta;
    meta.tracker_unit = static_cast<int>(j / 9) + 1;
    meta.sensor_kind = static_cast<SensorKind>((j % 9) / 3);
    meta.axis = static_cast<Axis>(j % 3);
    out.push_back(meta);
  }
  return out;
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;

void fnv_absorb(std::uint64_t& h, const void* bytes, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void fnv_absorb_u64(std::uint64_t& h, std::uint64_t v) { fnv_absorb(h, &v, sizeof v); }

}  // namespace

std::uint64_t dataset_checksum(const Dataset& ds) {
  std::uint64_t h = kFnvOffset;
  fnv_absorb_u64(h, ds.segments.size());
  fnv_absorb_u64(h, ds.channels.size());
  fnv_absorb_u64(h, static_cast<std::uint64_t>(ds.n_classes));
  fnv_absorb(h, &ds.sample_rate_hz, sizeof ds.sample_rate_hz);
  for (const auto& seg : ds.segments) {
    fnv_absorb_u64(h, static_cast<std::uint64_t>(seg.label));
    fnv_absorb_u64(h, static_cast<std::uint64_t>(seg.subject));
    fnv_absorb_u64(h, static_cast<std::uint64_t>(seg.segment_index));
    fnv_absorb_u64(h, seg.samples.rows());
    fnv_absorb_u64(h, seg.samples.cols());
    fnv_absorb(h, seg.samples.data(), seg.samples.rows() * seg.samples.cols() * sizeof(double));
  }
  return h;
}

}  // namespace noisebench
