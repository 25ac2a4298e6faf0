#pragma once

#include <cstdint>
#include <vector>

#include "eegdec/matrix.hpp"

namespace eegdec {

struct Cluster {
  double start_ms = 0.0;  // left edge of first timepoint
  double end_ms = 0.0;    // right edge of last timepoint (start + duration)
  double mass = 0.0;      // sum of the centered observed statistic
  double p_cluster = 1.0;
};

struct ClusterResult {
  std::vector<double> timepoints_ms;
  std::vector<double> observed;     // chance-centered statistic per timepoint
  std::vector<double> pointwise_p;  // plus-one convention, never exactly 0
  std::vector<Cluster> clusters;    // ordered, non-overlapping
  std::vector<std::size_t> significant;  // indices into clusters
};

struct ClusterConfig {
  int n_perm = 1000;
  double alpha = 0.05;
  double cluster_threshold_p = 0.01;
  double min_cluster_ms = 40.0;
  std::uint64_t rng_seed = 0;
};

// Sign-flip permutation test over per-run AUC time series (runs x timepoints).
// Each run is centered at 0.5; the null flips the sign of each run's whole
// centered series with probability 1/2 and averages across runs. Pointwise
// p-values use the plus-one convention; candidate clusters are maximal
// contiguous stretches with p <= cluster_threshold_p lasting strictly longer
// than min_cluster_ms (the duration filter applies to null draws identically);
// cluster mass is the sum of the centered observed statistic and is compared
// one-sided against the max-mass null.
ClusterResult cluster_test(const Matrix& auc_per_run,
                           const std::vector<double>& timepoints_ms,
                           const ClusterConfig& cfg);

// Exact variant: all 2^runs sign patterns instead of sampling (runs <= 20).
// The plus-one denominator becomes 1 + 2^runs.
ClusterResult enumerate_null(const Matrix& auc_per_run,
                             const std::vector<double>& timepoints_ms,
                             const ClusterConfig& cfg);

// Label-permutation variant operating on held-out per-subject score series
// (subjects x timepoints) instead of per-run AUC curves. Observed statistic is
// AUC(t) - 0.5; each permutation shuffles subject labels once and re-scores
// every timepoint with that one shuffle, preserving the temporal correlation
// of the series. Clustering and correction are identical to cluster_test.
// This is the calibrated default when per-run series are nearly collinear
// (deterministic cross-validation makes seed runs near-copies, which the
// sign-flip null treats as independent evidence).
ClusterResult cluster_test_scores(const Matrix& subject_scores,
                                  const std::vector<int>& labels,
                                  const std::vector<double>& timepoints_ms,
                                  const ClusterConfig& cfg);

}  // namespace eegdec
