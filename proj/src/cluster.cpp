#include "eegdec/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "eegdec/rng.hpp"
#include "eegdec/stats.hpp"

namespace eegdec {

namespace {

struct Span {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
  double mass = 0.0;
};

double timepoint_step(const std::vector<double>& tp) {
  return tp.size() > 1 ? tp[1] - tp[0] : 0.0;
}

// Maximal contiguous stretches with p <= threshold, kept only when their
// duration (len * dt) strictly exceeds min_ms; mass = sum of values.
std::vector<Span> find_spans(const std::vector<double>& p, const std::vector<double>& values,
                             double threshold, double min_ms, double dt) {
  std::vector<Span> out;
  const std::size_t n = p.size();
  std::size_t i = 0;
  while (i < n) {
    if (p[i] > threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && p[j + 1] <= threshold) ++j;
    const double duration = static_cast<double>(j - i + 1) * dt;
    if (duration > min_ms) {
      Span s;
      s.first = i;
      s.last = j;
      for (std::size_t k = i; k <= j; ++k) s.mass += values[k];
      out.push_back(s);
    }
    i = j + 1;
  }
  return out;
}

// Shared tail: observed centered series + null draws -> pointwise p, clusters,
// max-mass correction. The same plus-one counting and duration filter are
// applied to the observed series and to every null draw.
ClusterResult finish(const std::vector<double>& observed, const Matrix& null_draws,
                     const std::vector<double>& timepoints_ms, const ClusterConfig& cfg) {
  const std::size_t T = observed.size();
  const std::size_t M = null_draws.rows;
  const double denom = static_cast<double>(1 + M);
  const double dt = timepoint_step(timepoints_ms);

  // Column-sorted null values make every >= count a binary search:
  // sorted.at(m, t) holds the m-th smallest null value of timepoint t.
  Matrix sorted = null_draws;
  std::vector<double> col(M);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t m = 0; m < M; ++m) col[m] = null_draws.at(m, t);
    std::sort(col.begin(), col.end());
    for (std::size_t m = 0; m < M; ++m) sorted.at(m, t) = col[m];
  }
  auto count_ge = [&](std::size_t t, double x) {
    std::size_t a = 0, b = M;
    while (a < b) {
      const std::size_t mid = (a + b) / 2;
      if (sorted.at(mid, t) < x) a = mid + 1;
      else b = mid;
    }
    return M - a;
  };

  ClusterResult res;
  res.timepoints_ms = timepoints_ms;
  res.observed = observed;
  res.pointwise_p.resize(T);
  for (std::size_t t = 0; t < T; ++t)
    res.pointwise_p[t] =
        static_cast<double>(1 + count_ge(t, observed[t])) / denom;

  const std::vector<Span> obs_spans =
      find_spans(res.pointwise_p, observed, cfg.cluster_threshold_p, cfg.min_cluster_ms, dt);

  // Max surviving cluster mass per null draw (0 when a draw has none).
  std::vector<double> null_max_mass(M, 0.0);
  std::vector<double> pm(T), row_vals(T);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t t = 0; t < T; ++t) {
      row_vals[t] = null_draws.at(m, t);
      pm[t] = static_cast<double>(1 + count_ge(t, row_vals[t])) / denom;
    }
    for (const Span& s :
         find_spans(pm, row_vals, cfg.cluster_threshold_p, cfg.min_cluster_ms, dt))
      null_max_mass[m] = std::max(null_max_mass[m], s.mass);
  }

  for (const Span& s : obs_spans) {
    std::size_t count = 0;
    for (double v : null_max_mass)
      if (v >= s.mass) ++count;
    Cluster c;
    c.start_ms = timepoints_ms[s.first];
    c.end_ms = timepoints_ms[s.last] + dt;
    c.mass = s.mass;
    c.p_cluster = static_cast<double>(1 + count) / denom;
    if (c.p_cluster <= cfg.alpha) res.significant.push_back(res.clusters.size());
    res.clusters.push_back(c);
  }
  return res;
}

void check_series(const Matrix& m, const std::vector<double>& timepoints_ms,
                  std::size_t min_rows, const char* what) {
  if (m.rows < min_rows)
    throw std::runtime_error(std::string(what) + ": need at least " +
                             std::to_string(min_rows) + " rows, got " +
                             std::to_string(m.rows));
  if (m.cols != timepoints_ms.size())
    throw std::runtime_error(std::string(what) + ": " + std::to_string(m.cols) +
                             " timepoints vs " + std::to_string(timepoints_ms.size()) +
                             " timestamps");
  for (double v : m.data)
    if (!std::isfinite(v)) throw std::runtime_error(std::string(what) + ": non-finite value");
}

Matrix centered(const Matrix& auc_per_run) {
  Matrix c = auc_per_run;
  for (double& v : c.data) v -= 0.5;
  return c;
}

std::vector<double> mean_across_runs(const Matrix& runs) {
  std::vector<double> out(runs.cols, 0.0);
  for (std::size_t r = 0; r < runs.rows; ++r)
    for (std::size_t t = 0; t < runs.cols; ++t) out[t] += runs.at(r, t);
  for (double& v : out) v /= static_cast<double>(runs.rows);
  return out;
}

}  // namespace

ClusterResult cluster_test(const Matrix& auc_per_run,
                           const std::vector<double>& timepoints_ms,
                           const ClusterConfig& cfg) {
  check_series(auc_per_run, timepoints_ms, 2, "cluster_test");
  if (cfg.n_perm < 1) throw std::runtime_error("cluster_test: n_perm must be >= 1");
  const Matrix c = centered(auc_per_run);
  const std::vector<double> observed = mean_across_runs(c);

  const auto M = static_cast<std::size_t>(cfg.n_perm);
  Matrix null_draws(M, c.cols);
  for (std::size_t m = 0; m < M; ++m) {
    Rng rng(seed_mix(cfg.rng_seed, static_cast<std::uint64_t>(m)));
    double* dst = null_draws.row(m);
    for (std::size_t r = 0; r < c.rows; ++r) {
      const double sign = rng.coin() ? 1.0 : -1.0;
      for (std::size_t t = 0; t < c.cols; ++t) dst[t] += sign * c.at(r, t);
    }
    for (std::size_t t = 0; t < c.cols; ++t) dst[t] /= static_cast<double>(c.rows);
  }
  return finish(observed, null_draws, timepoints_ms, cfg);
}

ClusterResult enumerate_null(const Matrix& auc_per_run,
                             const std::vector<double>& timepoints_ms,
                             const ClusterConfig& cfg) {
  check_series(auc_per_run, timepoints_ms, 1, "enumerate_null");
  if (auc_per_run.rows > 20)
    throw std::runtime_error("enumerate_null: " + std::to_string(auc_per_run.rows) +
                             " runs would need 2^" + std::to_string(auc_per_run.rows) +
                             " patterns; limit is 20");
  const Matrix c = centered(auc_per_run);
  const std::vector<double> observed = mean_across_runs(c);

  const std::size_t M = std::size_t{1} << c.rows;
  Matrix null_draws(M, c.cols);
  for (std::size_t m = 0; m < M; ++m) {
    double* dst = null_draws.row(m);
    for (std::size_t r = 0; r < c.rows; ++r) {
      const double sign = (m >> r) & 1 ? -1.0 : 1.0;
      for (std::size_t t = 0; t < c.cols; ++t) dst[t] += sign * c.at(r, t);
    }
    for (std::size_t t = 0; t < c.cols; ++t) dst[t] /= static_cast<double>(c.rows);
  }
  return finish(observed, null_draws, timepoints_ms, cfg);
}

ClusterResult cluster_test_scores(const Matrix& subject_scores,
                                  const std::vector<int>& labels,
                                  const std::vector<double>& timepoints_ms,
                                  const ClusterConfig& cfg) {
  check_series(subject_scores, timepoints_ms, 2, "cluster_test_scores");
  if (labels.size() != subject_scores.rows)
    throw std::runtime_error("cluster_test_scores: label count mismatch");
  if (cfg.n_perm < 1) throw std::runtime_error("cluster_test_scores: n_perm must be >= 1");

  const std::size_t T = subject_scores.cols;
  const std::size_t n = subject_scores.rows;
  std::vector<double> colscores(n);
  auto auc_at = [&](std::size_t t, const std::vector<int>& lab) {
    for (std::size_t i = 0; i < n; ++i) colscores[i] = subject_scores.at(i, t);
    return auc(colscores, lab) - 0.5;
  };

  std::vector<double> observed(T);
  for (std::size_t t = 0; t < T; ++t) observed[t] = auc_at(t, labels);

  const auto M = static_cast<std::size_t>(cfg.n_perm);
  Matrix null_draws(M, T);
  std::vector<int> perm_labels(labels);
  for (std::size_t m = 0; m < M; ++m) {
    Rng rng(seed_mix(cfg.rng_seed, static_cast<std::uint64_t>(m)));
    perm_labels = labels;
    rng.shuffle(perm_labels);
    double* dst = null_draws.row(m);
    for (std::size_t t = 0; t < T; ++t) dst[t] = auc_at(t, perm_labels);
  }
  return finish(observed, null_draws, timepoints_ms, cfg);
}

}  // namespace eegdec
