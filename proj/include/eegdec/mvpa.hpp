#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eegdec/grouping.hpp"
#include "eegdec/logreg.hpp"
#include "eegdec/matrix.hpp"

namespace eegdec {

// Output of time-resolved leave-one-subject-out decoding. Alongside the
// per-seed AUC curves it keeps every subject's seed-averaged held-out score
// series, which is what the label-permutation cluster test consumes.
struct DecodingTimeSeries {
  std::vector<double> timepoints_ms;
  Matrix auc_per_seed;     // [seeds x timepoints]
  std::vector<double> mean_auc;
  Matrix support_counts;   // [channels x timepoints], fits with nonzero weight
  std::vector<int> n_models;  // per timepoint (= folds x seeds)
  Matrix subject_scores;   // [subjects x timepoints], mean over seeds
  std::vector<std::string> subject_ids;
  std::vector<int> subject_labels;
};

struct ChannelImportanceMap {
  std::vector<double> proportion;  // per channel, in [0, 1]
  std::pair<double, double> cluster_window_ms{0.0, 0.0};
};

// Per timepoint and seed: leave each subject out once, fit the sparse
// classifier on the remaining subjects' channel vectors at that timepoint,
// score the held-out subject, and pool all held-out scores into one AUC.
// Per-fit RNG streams derive from (seed, timepoint, fold), so results are
// identical for any thread count. Seeds vary fits only through cfg.init_jitter
// and the oversample draws; when both are off and several seeds are requested
// the runs are identical and a warning is printed once.
//
// Training folds are class-balanced by oversampling by default. Leaving one
// subject out skews the training class ratio against the held-out label, and
// with L1 pruning the intercept absorbs that ratio, anti-predicting every
// held-out subject; on small null cohorts this drags the AUC far below 0.5.
// Balancing removes the prior term and restores chance-level null decoding.
DecodingTimeSeries decode_timecourse(const std::vector<ErpSeries>& erps,
                                     const std::vector<int>& labels,
                                     const std::vector<std::uint64_t>& seeds,
                                     const FitConfig& cfg, bool oversample = true,
                                     unsigned threads = 0);

// proportion[c] = share of the given significant timepoints at which channel c
// was selected (nonzero weight) by a majority of that timepoint's models.
ChannelImportanceMap channel_importance(const DecodingTimeSeries& dts,
                                        const std::vector<std::size_t>& significant_timepoints);

// Named channel subset for an ablation axis: label plus the channel indices
// retained (resolved by the caller against a ChannelLayout).
struct ChannelSet {
  std::string label;
  std::vector<std::size_t> channels;
};

struct AblationTable {
  std::vector<double> time_ends_ms;
  std::vector<std::string> channel_set_labels;
  Matrix mean_auc;  // [channel_sets x time_ends], mean over retained timepoints and seeds
};

// Decoding-path ablation: rerun decode_timecourse on ERPs truncated to
// timepoints before each end time and reduced to each channel set, averaging
// mean_auc over the retained timepoints.
AblationTable ablation_grid(const std::vector<ErpSeries>& erps,
                            const std::vector<int>& labels,
                            const std::vector<double>& time_ends_ms,
                            const std::vector<ChannelSet>& channel_sets,
                            const std::vector<std::uint64_t>& seeds,
                            const FitConfig& cfg, bool oversample = true,
                            unsigned threads = 0);

}  // namespace eegdec
