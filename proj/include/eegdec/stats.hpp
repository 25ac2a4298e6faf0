#pragma once

#include <cstdint>
#include <cstddef>
#include <utility>
#include <vector>

namespace eegdec {

struct AucWithCi {
  double auc = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double p_vs_chance = 1.0;
  int n_boot = 0;
  int n_perm = 0;
};

// Mann-Whitney AUC: (#{pos>neg pairs} + 0.5 * #{tied pairs}) / (n_pos*n_neg),
// computed through midranks (identical value, including ties). labels are 0/1.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Percentile bootstrap over (score, label) pairs; degenerate single-class
// resamples are redrawn. Returns nearest-rank 2.5/97.5 percentiles of the
// n_boot recomputed AUCs. Deterministic per seed regardless of schedule: each
// draw uses its own derived stream.
std::pair<double, double> bootstrap_ci(const std::vector<double>& scores,
                                       const std::vector<int>& labels,
                                       int n_boot = 1000, std::uint64_t rng_seed = 0);

// Label-shuffle test of AUC > 0.5: p = (1 + #{AUC_perm >= AUC_obs}) / (1 + n_perm).
double perm_test_vs_chance(const std::vector<double>& scores,
                           const std::vector<int>& labels, int n_perm = 1000,
                           std::uint64_t rng_seed = 0);

// Exhaustive variant: walks every distinct assignment of the positive labels
// to positions (n choose n_pos patterns); feasible for small n only.
double perm_test_vs_chance_exact(const std::vector<double>& scores,
                                 const std::vector<int>& labels);

AucWithCi auc_with_ci(const std::vector<double>& scores, const std::vector<int>& labels,
                      int n_boot = 1000, int n_perm = 1000, std::uint64_t rng_seed = 0);

// Pearson correlation of average-ranked values (ties get their mean rank).
// Throws when either rank vector has zero variance.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Two-sided permutation p for rho != 0 (shuffle y).
double spearman_perm_p(const std::vector<double>& x, const std::vector<double>& y,
                       int n_perm = 1000, std::uint64_t rng_seed = 0);

// Tests rho(pred,q1) == rho(pred,q2) by swapping q1/q2 per subject with
// probability 1/2; two-sided on |delta|.
double perm_compare_correlations(const std::vector<double>& pred,
                                 const std::vector<double>& q1,
                                 const std::vector<double>& q2, int n_perm = 1000,
                                 std::uint64_t rng_seed = 0);

struct TTestResult {
  std::size_t group_a = 0;
  std::size_t group_b = 0;
  double t = 0.0;
  double df = 0.0;
  double p_raw = 1.0;
  double p_adj = 1.0;
  bool significant = false;
};

// Welch two-sample t-test per comparison pair (indices into groups);
// p_adj = min(1, p_raw * #comparisons), significance at 0.05 on p_adj.
std::vector<TTestResult> ttest_bonferroni(
    const std::vector<std::vector<double>>& groups,
    const std::vector<std::pair<std::size_t, std::size_t>>& comparisons);

// Regularized incomplete beta I_x(a, b); exposed for direct testing against
// reference values.
double incomplete_beta(double a, double b, double x);

}  // namespace eegdec
