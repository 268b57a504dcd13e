#include "noisebench/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "noisebench/error.hpp"
#include "noisebench/parallel.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

namespace fs = std::filesystem;

namespace {

std::string class_dir_name(int c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "a%02d", c);
  return buf;
}

std::string subject_dir_name(int p) { return "p" + std::to_string(p); }

std::string segment_file_name(int s) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "s%02d", s);
  return std::string(buf) + ".txt";
}

// Parses one s##.txt file: n_samples rows of n_channels comma-separated reals.
Matrix parse_segment_file(const fs::path& file, int n_samples, int n_channels) {
  std::ifstream in(file);
  if (!in) throw structure_error("cannot open segment file: " + file.string());

  Matrix samples(static_cast<std::size_t>(n_samples), static_cast<std::size_t>(n_channels));
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;  // trailing newline
    if (row >= n_samples)
      throw parse_error(file.string() + ": expected " + std::to_string(n_samples) +
                        " rows, found more");
    const char* p = line.data();
    const char* end = p + line.size();
    for (int col = 0; col < n_channels; ++col) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      double value = 0.0;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc()) {
        throw parse_error(file.string() + ":" + std::to_string(row + 1) +
                          ": non-numeric value in column " + std::to_string(col + 1));
      }
      if (!std::isfinite(value)) {
        throw validation_error(file.string() + ":" + std::to_string(row + 1) +
                               ": non-finite value in column " + std::to_string(col + 1));
      }
      samples(static_cast<std::size_t>(row), static_cast<std::size_t>(col)) = value;
      p = next;
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (col + 1 < n_channels) {
        if (p >= end || *p != ',')
          throw parse_error(file.string() + ":" + std::to_string(row + 1) + ": expected " +
                            std::to_string(n_channels) + " columns, found " +
                            std::to_string(col + 1));
        ++p;
      }
    }
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p < end)
      throw parse_error(file.string() + ":" + std::to_string(row + 1) + ": expected " +
                        std::to_string(n_channels) + " columns, found more");
    ++row;
  }
  if (row != n_samples)
    throw parse_error(file.string() + ": expected " + std::to_string(n_samples) +
                      " rows, found " + std::to_string(row));
  return samples;
}

}  // namespace

Dataset load_activity_dataset(const fs::path& root, const ShapeConfig& expected, unsigned jobs) {
  if (!fs::exists(root)) throw structure_error("dataset root does not exist: " + root.string());
  if (!fs::is_directory(root))
    throw structure_error("dataset root is not a directory: " + root.string());

  struct Slot {
    fs::path file;
    int label, subject, segment_index;
  };
  std::vector<Slot> slots;
  slots.reserve(static_cast<std::size_t>(expected.n_classes) * expected.n_subjects *
                expected.segments_per_cell);
  for (int c = 1; c <= expected.n_classes; ++c) {
    fs::path class_dir = root / class_dir_name(c);
    if (!fs::is_directory(class_dir))
      throw structure_error("missing class directory: " + class_dir.string());
    for (int p = 1; p <= expected.n_subjects; ++p) {
      fs::path subject_dir = class_dir / subject_dir_name(p);
      if (!fs::is_directory(subject_dir))
        throw structure_error("missing subject directory: " + subject_dir.string());
      for (int s = 1; s <= expected.segments_per_cell; ++s) {
        fs::path file = subject_dir / segment_file_name(s);
        if (!fs::exists(file)) throw structure_error("missing segment file: " + file.string());
        slots.push_back({file, c, p, s});
      }
    }
  }

  Dataset ds;
  ds.segments.resize(slots.size());
  ds.channels = standard_channel_layout(static_cast<std::size_t>(expected.n_channels));
  ds.n_classes = expected.n_classes;

  // Files parse in parallel into preassigned slots; order is layout-derived,
  // never scheduling-derived.
  parallel_for(slots.size(), jobs, [&](std::size_t i) {
    const Slot& slot = slots[i];
    Segment seg;
    seg.samples = parse_segment_file(slot.file, expected.n_samples, expected.n_channels);
    seg.label = slot.label;
    seg.subject = slot.subject;
    seg.segment_index = slot.segment_index;
    ds.segments[i] = std::move(seg);
  });
  return ds;
}

void write_dataset(const Dataset& ds, const fs::path& root, const ShapeConfig& shape) {
  for (const auto& seg : ds.segments) {
    fs::path dir = root / class_dir_name(seg.label) / subject_dir_name(seg.subject);
    fs::create_directories(dir);
    fs::path file = dir / segment_file_name(seg.segment_index);
    std::ofstream out(file);
    if (!out) throw structure_error("cannot write segment file: " + file.string());
    char buf[64];
    for (std::size_t r = 0; r < seg.samples.rows(); ++r) {
      for (std::size_t c = 0; c < seg.samples.cols(); ++c) {
        // %.17g round-trips doubles exactly through the loader.
        std::snprintf(buf, sizeof buf, "%.17g", seg.samples(r, c));
        if (c) out << ',';
        out << buf;
      }
      out << '\n';
    }
  }
  (void)shape;
}

ValidationReport validate_dataset(const Dataset& ds) {
  ValidationReport report;
  constexpr std::size_t kMaxFindings = 50;

  auto coord = [&](std::size_t i) {
    const Segment& s = ds.segments[i];
    return "segment " + std::to_string(i) + " (class " + std::to_string(s.label) + ", subject " +
           std::to_string(s.subject) + ", index " + std::to_string(s.segment_index) + ")";
  };
  auto add_finding = [&](ValidationCheck& check, std::string text) {
    check.passed = false;
    if (check.findings.size() < kMaxFindings) check.findings.push_back(std::move(text));
  };

  ValidationCheck finiteness;
  finiteness.name = "finiteness";
  for (std::size_t i = 0; i < ds.segments.size(); ++i) {
    const Matrix& m = ds.segments[i].samples;
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (!std::isfinite(m(r, c)))
          add_finding(finiteness, coord(i) + ": non-finite value at sample " + std::to_string(r) +
                                       ", channel " + std::to_string(c));
  }
  report.checks.push_back(std::move(finiteness));

  ValidationCheck shape;
  shape.name = "shape_uniformity";
  if (!ds.segments.empty()) {
    std::size_t rows = ds.segments.front().samples.rows();
    std::size_t cols = ds.segments.front().samples.cols();
    if (cols != ds.channels.size())
      add_finding(shape, "segment width " + std::to_string(cols) + " does not match " +
                             std::to_string(ds.channels.size()) + " channel descriptors");
    for (std::size_t i = 0; i < ds.segments.size(); ++i) {
      const Matrix& m = ds.segments[i].samples;
      if (m.rows() != rows || m.cols() != cols)
        add_finding(shape, coord(i) + ": shape " + std::to_string(m.rows()) + "x" +
                               std::to_string(m.cols()) + " differs from " + std::to_string(rows) +
                               "x" + std::to_string(cols));
    }
  }
  report.checks.push_back(std::move(shape));

  ValidationCheck labels;
  labels.name = "label_coverage";
  std::vector<std::size_t> class_counts(static_cast<std::size_t>(std::max(ds.n_classes, 0)) + 1, 0);
  for (std::size_t i = 0; i < ds.segments.size(); ++i) {
    int label = ds.segments[i].label;
    if (label < 1 || label > ds.n_classes)
      add_finding(labels, coord(i) + ": label " + std::to_string(label) + " outside [1, " +
                              std::to_string(ds.n_classes) + "]");
    else
      ++class_counts[static_cast<std::size_t>(label)];
  }
  for (int c = 1; c <= ds.n_classes; ++c)
    if (class_counts[static_cast<std::size_t>(c)] == 0)
      add_finding(labels, "class " + std::to_string(c) + " has no segments");
  report.checks.push_back(std::move(labels));

  ValidationCheck duplicates;
  duplicates.name = "duplicate_segments";
  duplicates.warning_only = true;
  {
    // Bucket by checksum, then confirm bitwise equality within buckets.
    std::map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < ds.segments.size(); ++i) {
      const Matrix& m = ds.segments[i].samples;
      std::uint64_t h = 0xCBF29CE484222325ULL;
      const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
      for (std::size_t b = 0; b < m.rows() * m.cols() * sizeof(double); ++b) {
        h ^= bytes[b];
        h *= 0x100000001B3ULL;
      }
      buckets[h].push_back(i);
    }
    for (const auto& [hash, members] : buckets) {
      if (members.size() < 2) continue;
      for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
          if (ds.segments[members[a]].samples == ds.segments[members[b]].samples)
            add_finding(duplicates,
                        coord(members[a]) + " and " + coord(members[b]) + " are bitwise identical");
    }
  }
  report.checks.push_back(std::move(duplicates));

  return report;
}

Dataset synth_dataset(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.n_classes < 2) throw config_error("synth: n_classes must be >= 2");
  if (spec.n_subjects < 1) throw config_error("synth: n_subjects must be >= 1");
  if (spec.segments_per_cell < 1) throw config_error("synth: segments_per_cell must be >= 1");
  if (spec.n_channels < 1) throw config_error("synth: n_channels must be >= 1");
  if (spec.n_samples < 1) throw config_error("synth: n_samples must be >= 1");
  if (spec.sample_rate_hz <= 0.0) throw config_error("synth: sample_rate_hz must be > 0");

  const std::size_t n_channels = static_cast<std::size_t>(spec.n_channels);
  const std::size_t n_samples = static_cast<std::size_t>(spec.n_samples);

  // Per-class frequency bands spread below Nyquist keep classes separable.
  const double nyquist = spec.sample_rate_hz / 2.0;
  const double band_lo = 0.3;
  const double band_width = (0.85 * nyquist - band_lo) / spec.n_classes;

  struct ChannelParams {
    double amplitude, phase, offset;
  };
  std::vector<double> class_freq(static_cast<std::size_t>(spec.n_classes));
  std::vector<std::vector<ChannelParams>> params(static_cast<std::size_t>(spec.n_classes));
  {
    Rng rng(mix64_seq({seed, 0x5359'4E54'4850'524DULL}));  // waveform parameter stream
    for (int c = 0; c < spec.n_classes; ++c) {
      class_freq[static_cast<std::size_t>(c)] =
          band_lo + (c + rng.next_range(0.2, 0.8)) * band_width;
      auto& per_channel = params[static_cast<std::size_t>(c)];
      per_channel.resize(n_channels);
      for (auto& cp : per_channel) {
        cp.amplitude = rng.next_range(0.5, 2.0);
        cp.phase = rng.next_range(0.0, 2.0 * std::numbers::pi);
        cp.offset = rng.next_range(-1.0, 1.0);
      }
    }
  }

  Dataset ds;
  ds.channels = standard_channel_layout(n_channels);
  ds.sample_rate_hz = spec.sample_rate_hz;
  ds.n_classes = spec.n_classes;
  ds.segments.reserve(static_cast<std::size_t>(spec.n_classes) * spec.n_subjects *
                      spec.segments_per_cell);

  std::uint64_t ordinal = 0;
  for (int c = 1; c <= spec.n_classes; ++c) {
    double freq = class_freq[static_cast<std::size_t>(c - 1)];
    const auto& per_channel = params[static_cast<std::size_t>(c - 1)];
    for (int p = 1; p <= spec.n_subjects; ++p) {
      for (int s = 1; s <= spec.segments_per_cell; ++s, ++ordinal) {
        Rng jitter(mix64_seq({seed, 0x4A49'5454'4552'0000ULL, ordinal}));
        Segment seg;
        seg.samples = Matrix(n_samples, n_channels);
        seg.label = c;
        seg.subject = p;
        seg.segment_index = s;
        for (std::size_t j = 0; j < n_channels; ++j) {
          const ChannelParams& cp = per_channel[j];
          for (std::size_t t = 0; t < n_samples; ++t) {
            double clean = cp.amplitude * std::sin(2.0 * std::numbers::pi * freq *
                                                       static_cast<double>(t) /
                                                       spec.sample_rate_hz +
                                                   cp.phase) +
                           cp.offset;
            seg.samples(t, j) = clean + 0.05 * cp.amplitude * jitter.next_gaussian();
          }
        }
        ds.segments.push_back(std::move(seg));
      }
    }
  }
  return ds;
}

}  // namespace noisebench
