#include "noisebench/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "noisebench/error.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

double mean_power(std::span<const double> samples) {
  if (samples.empty()) throw argument_error("mean_power: empty sample vector");
  double acc = 0.0;
  for (double x : samples) acc += x * x;
  return acc / static_cast<double>(samples.size());
}

double sigma_for_snr(double power, double snr_db) {
  if (power < 0.0) throw argument_error("sigma_for_snr: negative power");
  if (std::isnan(snr_db)) throw argument_error("sigma_for_snr: NaN snr");
  if (power == 0.0) return 0.0;  // silent channel, any snr
  return std::sqrt(power * std::pow(10.0, -snr_db / 10.0));
}

std::vector<double> gaussian_noise(std::size_t n, double sigma, std::uint64_t stream_seed) {
  if (sigma < 0.0) throw argument_error("gaussian_noise: negative sigma");
  std::vector<double> out(n, 0.0);
  if (sigma == 0.0) return out;
  Rng rng(stream_seed);
  for (double& x : out) x = sigma * rng.next_gaussian();
  return out;
}

std::uint64_t noise_stream_seed(std::uint64_t master_seed, int trial, std::size_t segment_ordinal,
                                std::size_t channel) {
  return mix64_seq({master_seed, static_cast<std::uint64_t>(trial),
                    static_cast<std::uint64_t>(segment_ordinal),
                    static_cast<std::uint64_t>(channel)});
}

InjectResult inject(const Segment& segment, std::size_t segment_ordinal, const NoisePlan& plan,
                    int trial) {
  if (trial < 0 || trial >= plan.trials)
    throw argument_error("inject: trial " + std::to_string(trial) + " outside [0, " +
                         std::to_string(plan.trials) + ")");

  const std::size_t n_samples = segment.samples.rows();
  const std::size_t n_channels = segment.samples.cols();

  InjectResult result;
  result.segment = segment;
  for (std::size_t j = 0; j < n_channels; ++j) {
    std::vector<double> channel(n_samples);
    for (std::size_t t = 0; t < n_samples; ++t) channel[t] = segment.samples(t, j);
    double power = mean_power(channel);
    if (power == 0.0) {
      result.zero_power_channels.push_back(j);
      continue;
    }
    double sigma = sigma_for_snr(power, plan.snr_db);
    if (sigma == 0.0) continue;  // noise disabled (snr = +inf): bit-exact passthrough
    std::vector<double> noise =
        gaussian_noise(n_samples, sigma, noise_stream_seed(plan.master_seed, trial,
                                                           segment_ordinal, j));
    for (std::size_t t = 0; t < n_samples; ++t)
      result.segment.samples(t, j) = channel[t] + noise[t];
  }
  return result;
}

double measure_snr(std::span<const double> clean, std::span<const double> noisy) {
  if (clean.size() != noisy.size() || clean.empty())
    throw argument_error("measure_snr: length mismatch or empty input");
  double clean_power = mean_power(clean);
  if (clean_power == 0.0) throw argument_error("measure_snr: undefined, zero clean power");
  double diff_power = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    double d = noisy[i] - clean[i];
    diff_power += d * d;
  }
  diff_power /= static_cast<double>(clean.size());
  if (diff_power == 0.0) throw argument_error("measure_snr: undefined, zero difference power");
  return 10.0 * std::log10(clean_power / diff_power);
}

NoiseStats noise_stats(std::span<const double> clean, std::span<const double> noisy) {
  if (clean.size() != noisy.size() || clean.empty())
    throw argument_error("noise_stats: length mismatch or empty input");
  NoiseStats stats;
  const std::size_t n = clean.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += noisy[i] - clean[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = (noisy[i] - clean[i]) - mean;
    var += d * d;
  }
  stats.sample_mean = mean;
  stats.sample_variance = var / static_cast<double>(n);
  if (mean_power(clean) > 0.0) {
    double diff_power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = noisy[i] - clean[i];
      diff_power += d * d;
    }
    diff_power /= static_cast<double>(n);
    if (diff_power > 0.0)
      stats.measured_snr_db = 10.0 * std::log10(mean_power(clean) / diff_power);
  }
  return stats;
}

Histogram noise_histogram(std::span<const double> noise, std::size_t bins) {
  if (noise.empty()) throw argument_error("noise_histogram: empty input");
  if (bins < 1) throw argument_error("noise_histogram: bins must be >= 1");

  auto [lo_it, hi_it] = std::minmax_element(noise.begin(), noise.end());
  double lo = *lo_it, hi = *hi_it;

  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  for (std::size_t i = 0; i <= bins; ++i)
    h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);

  if (hi == lo) {
    h.counts[0] = noise.size();
    return h;
  }
  for (double x : noise) {
    auto bin = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
    if (bin >= bins) bin = bins - 1;  // x == max
    ++h.counts[bin];
  }
  return h;
}

std::string histogram_to_csv(const Histogram& h) {
  std::string out = "bin_center,count\n";
  char buf[64];
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%zu\n", h.bin_center(i), h.counts[i]);
    out += buf;
  }
  return out;
}

}  // namespace noisebench
