#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "eegdec/dataset.hpp"

namespace eegdec {

// Per-trial preprocessing: baseline z-scoring, block-mean resampling, temporal
// window averaging for decoding timepoints, and time/channel restriction.
// All operations are pure; the input trial is never modified.
struct PrepConfig {
  std::pair<double, double> baseline_window_ms{-200.0, 0.0};
  std::optional<double> target_rate_hz{};  // absent = keep native rate
  double mvpa_window_ms = 10.0;
  double std_floor = 1e-10;
};

// Half-open time window [start_ms, end_ms): a sample at time t belongs to the
// window when start_ms <= t < end_ms.
struct TimeWindow {
  double start_ms = 0.0;
  double end_ms = 0.0;
};

// Z-scores each channel against its own baseline segment: (x - mu) / sigma
// with mu, sigma the mean and population (ddof=0) standard deviation over the
// baseline samples. Channels whose baseline sigma falls below cfg.std_floor
// are only mean-subtracted. Throws if the baseline window holds < 2 samples.
EpochedTrial baseline_zscore(const EpochedTrial& trial, const PrepConfig& cfg);

// Block-mean decimation: each non-overlapping run of k = rate/target samples
// becomes its mean; trailing remainder samples are dropped. The source rate
// must be an integer multiple of the target rate.
EpochedTrial resample(const EpochedTrial& trial, double target_rate_hz);

// Averages within windows of window_ms, advancing by stride_ms per output
// sample (stride_ms <= 0 means stride = window, i.e. non-overlapping blocks,
// in which case this is exactly resample with k = round(window_ms*rate/1000)).
// Output timestamps are the window left edges.
EpochedTrial window_average(const EpochedTrial& trial, double window_ms,
                            double stride_ms = 0.0);

// Keeps samples inside the half-open window and the given channels (output in
// original channel order regardless of request order). Throws when the
// selection is empty. The two-argument form keeps all channels.
EpochedTrial restrict(const EpochedTrial& trial, TimeWindow window);
EpochedTrial restrict(const EpochedTrial& trial, TimeWindow window,
                      const std::vector<std::size_t>& channels);

}  // namespace eegdec
