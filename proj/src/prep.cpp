#include "eegdec/prep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eegdec {

namespace {

// Indices t with start <= time_ms(t) < end.
std::pair<std::size_t, std::size_t> sample_range(const EpochedTrial& trial,
                                                 double start_ms, double end_ms) {
  const double dt = 1000.0 / trial.sample_rate_hz;
  std::size_t lo = trial.n_samples, hi = 0;
  for (std::size_t t = 0; t < trial.n_samples; ++t) {
    const double tm = trial.epoch_start_ms + static_cast<double>(t) * dt;
    if (tm >= start_ms && tm < end_ms) {
      if (t < lo) lo = t;
      hi = t + 1;
    }
  }
  if (lo >= hi) {
    throw std::runtime_error("time window [" + std::to_string(start_ms) + ", " +
                             std::to_string(end_ms) + ") selects no samples");
  }
  return {lo, hi};
}

std::size_t decimation_factor(double rate, double target, const char* what) {
  if (target <= 0.0) throw std::runtime_error(std::string(what) + ": nonpositive target rate");
  const double kd = rate / target;
  const auto k = static_cast<long long>(std::llround(kd));
  if (k < 1 || std::abs(kd - static_cast<double>(k)) > 1e-9 * kd) {
    throw std::runtime_error(std::string(what) + ": rate " + std::to_string(rate) +
                             " Hz is not an integer multiple of " + std::to_string(target) +
                             " Hz");
  }
  return static_cast<std::size_t>(k);
}

EpochedTrial block_average(const EpochedTrial& trial, std::size_t k, std::size_t stride) {
  if (trial.n_samples < k) {
    throw std::runtime_error("trial holds " + std::to_string(trial.n_samples) +
                             " samples, shorter than one averaging block of " +
                             std::to_string(k));
  }
  const std::size_t n_out = (trial.n_samples - k) / stride + 1;
  EpochedTrial out;
  out.meta = trial.meta;
  out.n_channels = trial.n_channels;
  out.n_samples = n_out;
  out.sample_rate_hz = trial.sample_rate_hz / static_cast<double>(stride);
  out.epoch_start_ms = trial.epoch_start_ms;
  out.data.resize(out.n_channels * n_out);
  for (std::size_t c = 0; c < trial.n_channels; ++c) {
    const double* src = trial.data.data() + c * trial.n_samples;
    double* dst = out.data.data() + c * n_out;
    for (std::size_t j = 0; j < n_out; ++j) {
      double acc = 0.0;
      const std::size_t s0 = j * stride;
      for (std::size_t s = s0; s < s0 + k; ++s) acc += src[s];
      dst[j] = acc / static_cast<double>(k);
    }
  }
  return out;
}

}  // namespace

EpochedTrial baseline_zscore(const EpochedTrial& trial, const PrepConfig& cfg) {
  const auto [lo, hi] =
      sample_range(trial, cfg.baseline_window_ms.first, cfg.baseline_window_ms.second);
  const std::size_t nb = hi - lo;
  if (nb < 2) throw std::runtime_error("baseline window holds fewer than 2 samples");

  EpochedTrial out = trial;
  for (std::size_t c = 0; c < trial.n_channels; ++c) {
    const double* src = trial.data.data() + c * trial.n_samples;
    double mu = 0.0;
    for (std::size_t t = lo; t < hi; ++t) mu += src[t];
    mu /= static_cast<double>(nb);
    double var = 0.0;
    for (std::size_t t = lo; t < hi; ++t) {
      const double d = src[t] - mu;
      var += d * d;
    }
    var /= static_cast<double>(nb);
    double sigma = std::sqrt(var);
    if (sigma < cfg.std_floor) sigma = 1.0;
    double* dst = out.data.data() + c * trial.n_samples;
    for (std::size_t t = 0; t < trial.n_samples; ++t) dst[t] = (src[t] - mu) / sigma;
  }
  return out;
}

EpochedTrial resample(const EpochedTrial& trial, double target_rate_hz) {
  const std::size_t k = decimation_factor(trial.sample_rate_hz, target_rate_hz, "resample");
  if (k == 1) return trial;
  // Trailing remainder drops via n_out = floor(n/k) inside block_average.
  EpochedTrial out = block_average(trial, k, k);
  out.sample_rate_hz = target_rate_hz;
  return out;
}

EpochedTrial window_average(const EpochedTrial& trial, double window_ms, double stride_ms) {
  if (window_ms <= 0.0) throw std::runtime_error("window_average: nonpositive window");
  const auto k = static_cast<long long>(
      std::llround(window_ms * trial.sample_rate_hz / 1000.0));
  if (k < 1) {
    throw std::runtime_error("window_average: window " + std::to_string(window_ms) +
                             " ms is shorter than one sample period");
  }
  long long stride = k;
  if (stride_ms > 0.0) {
    stride = static_cast<long long>(std::llround(stride_ms * trial.sample_rate_hz / 1000.0));
    if (stride < 1) throw std::runtime_error("window_average: stride shorter than one sample");
  }
  return block_average(trial, static_cast<std::size_t>(k), static_cast<std::size_t>(stride));
}

EpochedTrial restrict(const EpochedTrial& trial, TimeWindow window) {
  std::vector<std::size_t> all(trial.n_channels);
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
  return restrict(trial, window, all);
}

EpochedTrial restrict(const EpochedTrial& trial, TimeWindow window,
                      const std::vector<std::size_t>& channels) {
  if (channels.empty()) throw std::runtime_error("restrict: empty channel selection");
  std::vector<std::size_t> chs = channels;
  std::sort(chs.begin(), chs.end());
  chs.erase(std::unique(chs.begin(), chs.end()), chs.end());
  if (chs.back() >= trial.n_channels) {
    throw std::runtime_error("restrict: channel index " + std::to_string(chs.back()) +
                             " out of range (trial has " + std::to_string(trial.n_channels) +
                             " channels)");
  }
  const auto [lo, hi] = sample_range(trial, window.start_ms, window.end_ms);
  const std::size_t n_out = hi - lo;

  EpochedTrial out;
  out.meta = trial.meta;
  out.n_channels = chs.size();
  out.n_samples = n_out;
  out.sample_rate_hz = trial.sample_rate_hz;
  out.epoch_start_ms = trial.time_ms(lo);
  out.data.resize(out.n_channels * n_out);
  for (std::size_t i = 0; i < chs.size(); ++i) {
    const double* src = trial.data.data() + chs[i] * trial.n_samples + lo;
    std::copy(src, src + n_out, out.data.data() + i * n_out);
  }
  return out;
}

}  // namespace eegdec
