#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisebench/dataset.hpp"

namespace noisebench {

// Fully determines a noise injection run. Power scope is fixed:
// per-channel-per-segment mean-square estimation.
struct NoisePlan {
  double snr_db = 20.0;  // +infinity disables noise (sigma becomes 0)
  int trials = 1;
  std::uint64_t master_seed = 0;
};

struct NoiseStats {
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  std::optional<double> measured_snr_db;  // absent when clean power is 0
};

// Mean square including DC: (1/N) * sum(x^2).
double mean_power(std::span<const double> samples);

// Noise sigma that hits the target SNR for the given signal power:
// sigma = sqrt(power * 10^(-snr_db / 10)). Zero power yields zero sigma.
double sigma_for_snr(double power, double snr_db);

// n draws from Normal(0, sigma^2). Sampling algorithm: Box-Muller over
// xoshiro256++ seeded from the stream seed (see rng.hpp). Deterministic.
std::vector<double> gaussian_noise(std::size_t n, double sigma, std::uint64_t stream_seed);

// Stream seed for one (trial, segment, channel) noise vector. The segment
// ordinal is the segment's position in its dataset, which keeps noise unique
// per sensor channel per recording. Note the SNR does not enter the seed:
// one trial reuses the same unit draws across the grid, scaled per target.
std::uint64_t noise_stream_seed(std::uint64_t master_seed, int trial, std::size_t segment_ordinal,
                                std::size_t channel);

struct InjectResult {
  Segment segment;
  // Channels whose clean power was zero and therefore passed through
  // unchanged (SNR undefined; injecting would fabricate a scale).
  std::vector<std::size_t> zero_power_channels;
};

// Returns a noisy copy of the segment; the input is never modified.
// Per channel: estimate mean power over this segment, derive sigma for the
// plan's SNR, add a fresh seeded noise vector.
InjectResult inject(const Segment& segment, std::size_t segment_ordinal, const NoisePlan& plan,
                    int trial);

// 10*log10(mean_power(clean) / mean_power(noisy - clean)).
// Throws when clean power or difference power is zero (SNR undefined).
double measure_snr(std::span<const double> clean, std::span<const double> noisy);

NoiseStats noise_stats(std::span<const double> clean, std::span<const double> noisy);

struct Histogram {
  std::vector<double> edges;       // bins + 1 ascending edges over [min, max]
  std::vector<std::size_t> counts;  // per bin; sums to the input length

  double bin_center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
};

// Equal-width histogram spanning [min, max]. Degenerate input (min == max)
// lands entirely in the first bin.
Histogram noise_histogram(std::span<const double> noise, std::size_t bins);

// Two-column CSV (bin_center,count) for Figure-2-style plots.
std::string histogram_to_csv(const Histogram& h);

}  // namespace noisebench
