#include "eegdec/mvpa.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "eegdec/parallel.hpp"
#include "eegdec/stats.hpp"

namespace eegdec {

namespace {

void check_cohort(const std::vector<ErpSeries>& erps, const std::vector<int>& labels) {
  if (erps.size() != labels.size())
    throw std::runtime_error("decode_timecourse: " + std::to_string(erps.size()) +
                             " ERPs vs " + std::to_string(labels.size()) + " labels");
  std::size_t n0 = 0, n1 = 0;
  for (int y : labels) {
    if (y == 0) ++n0;
    else if (y == 1) ++n1;
    else throw std::runtime_error("decode_timecourse: labels must be 0 or 1");
  }
  if (n0 < 2 || n1 < 2)
    throw std::runtime_error("decode_timecourse: need at least 2 subjects per class (got " +
                             std::to_string(n0) + "/" + std::to_string(n1) + ")");
  const ErpSeries& first = erps.front();
  for (const ErpSeries& e : erps) {
    if (e.n_channels != first.n_channels || e.n_timepoints != first.n_timepoints ||
        e.sample_rate_hz != first.sample_rate_hz || e.start_ms != first.start_ms)
      throw std::runtime_error("decode_timecourse: subject '" + e.subject_id +
                               "' has a different ERP shape");
  }
}

}  // namespace

DecodingTimeSeries decode_timecourse(const std::vector<ErpSeries>& erps,
                                     const std::vector<int>& labels,
                                     const std::vector<std::uint64_t>& seeds,
                                     const FitConfig& cfg, bool oversample,
                                     unsigned threads) {
  check_cohort(erps, labels);
  if (seeds.empty()) throw std::runtime_error("decode_timecourse: no seeds given");
  if (seeds.size() > 1 && cfg.init_jitter == 0.0 && !oversample)
    std::fprintf(stderr,
                 "warning: %zu seeds requested but init_jitter = 0 and oversampling is "
                 "off; all seed runs will be identical\n",
                 seeds.size());

  const std::size_t n_sub = erps.size();
  const std::size_t n_ch = erps.front().n_channels;
  const std::size_t T = erps.front().n_timepoints;
  const std::size_t S = seeds.size();

  DecodingTimeSeries out;
  out.timepoints_ms.resize(T);
  for (std::size_t t = 0; t < T; ++t) out.timepoints_ms[t] = erps.front().time_ms(t);
  out.auc_per_seed = Matrix(S, T);
  out.mean_auc.assign(T, 0.0);
  out.support_counts = Matrix(n_ch, T);
  out.n_models.assign(T, 0);
  out.subject_scores = Matrix(n_sub, T);
  out.subject_ids.resize(n_sub);
  out.subject_labels = labels;
  for (std::size_t i = 0; i < n_sub; ++i) out.subject_ids[i] = erps[i].subject_id;

  // One work unit per timepoint: a unit owns column t of every output, so the
  // reduction is race-free and identical for any schedule.
  parallel_for(T, [&](std::size_t t) {
    std::vector<double> scores(n_sub);
    std::vector<int> y_train;
    Matrix X_train;
    Matrix x_test(1, n_ch);
    for (std::size_t s = 0; s < S; ++s) {
      const std::uint64_t base = seed_mix(seeds[s], static_cast<std::uint64_t>(t));
      for (std::size_t hold = 0; hold < n_sub; ++hold) {
        const std::uint64_t fold_seed = seed_mix(base, static_cast<std::uint64_t>(hold));
        X_train = Matrix(n_sub - 1, n_ch);
        y_train.clear();
        std::size_t r = 0;
        for (std::size_t i = 0; i < n_sub; ++i) {
          if (i == hold) continue;
          for (std::size_t c = 0; c < n_ch; ++c) X_train.at(r, c) = erps[i].at(c, t);
          y_train.push_back(labels[i]);
          ++r;
        }
        if (oversample) {
          Rng os_rng(seed_mix(fold_seed, 2));
          const std::vector<std::size_t> rows = oversample_indices(y_train, os_rng);
          if (rows.size() != X_train.rows) {
            Matrix X2(rows.size(), n_ch);
            std::vector<int> y2(rows.size());
            for (std::size_t k = 0; k < rows.size(); ++k) {
              std::copy(X_train.row(rows[k]), X_train.row(rows[k]) + n_ch, X2.row(k));
              y2[k] = y_train[rows[k]];
            }
            X_train = std::move(X2);
            y_train = std::move(y2);
          }
        }
        FitConfig fold_cfg = cfg;
        fold_cfg.rng_seed = fold_seed;
        const LogRegModel model = fit(X_train, y_train, fold_cfg);
        for (std::size_t c = 0; c < n_ch; ++c)
          if (model.weights[c] != 0.0) out.support_counts.at(c, t) += 1.0;
        for (std::size_t c = 0; c < n_ch; ++c) x_test.at(0, c) = erps[hold].at(c, t);
        scores[hold] = predict_proba(model, x_test)[0];
      }
      out.auc_per_seed.at(s, t) = auc(scores, labels);
      for (std::size_t i = 0; i < n_sub; ++i) out.subject_scores.at(i, t) += scores[i];
    }
    for (std::size_t i = 0; i < n_sub; ++i)
      out.subject_scores.at(i, t) /= static_cast<double>(S);
    double m = 0.0;
    for (std::size_t s = 0; s < S; ++s) m += out.auc_per_seed.at(s, t);
    out.mean_auc[t] = m / static_cast<double>(S);
    out.n_models[t] = static_cast<int>(n_sub * S);
  }, threads);

  return out;
}

ChannelImportanceMap channel_importance(
    const DecodingTimeSeries& dts, const std::vector<std::size_t>& significant_timepoints) {
  if (significant_timepoints.empty())
    throw std::runtime_error("channel_importance: empty significant window");
  for (std::size_t t : significant_timepoints)
    if (t >= dts.timepoints_ms.size())
      throw std::runtime_error("channel_importance: timepoint index " + std::to_string(t) +
                               " out of range");

  const std::size_t n_ch = dts.support_counts.rows;
  ChannelImportanceMap map;
  map.proportion.assign(n_ch, 0.0);
  for (std::size_t c = 0; c < n_ch; ++c) {
    std::size_t hits = 0;
    for (std::size_t t : significant_timepoints) {
      const double share =
          dts.support_counts.at(c, t) / static_cast<double>(dts.n_models[t]);
      if (share > 0.5) ++hits;
    }
    map.proportion[c] =
        static_cast<double>(hits) / static_cast<double>(significant_timepoints.size());
  }
  const auto [lo_it, hi_it] =
      std::minmax_element(significant_timepoints.begin(), significant_timepoints.end());
  const double dt = dts.timepoints_ms.size() > 1
                        ? dts.timepoints_ms[1] - dts.timepoints_ms[0]
                        : 0.0;
  map.cluster_window_ms = {dts.timepoints_ms[*lo_it], dts.timepoints_ms[*hi_it] + dt};
  return map;
}

AblationTable ablation_grid(const std::vector<ErpSeries>& erps,
                            const std::vector<int>& labels,
                            const std::vector<double>& time_ends_ms,
                            const std::vector<ChannelSet>& channel_sets,
                            const std::vector<std::uint64_t>& seeds,
                            const FitConfig& cfg, bool oversample, unsigned threads) {
  if (time_ends_ms.empty() || channel_sets.empty())
    throw std::runtime_error("ablation_grid: empty grid axis");
  check_cohort(erps, labels);

  AblationTable table;
  table.time_ends_ms = time_ends_ms;
  table.mean_auc = Matrix(channel_sets.size(), time_ends_ms.size());
  for (const ChannelSet& cs : channel_sets) table.channel_set_labels.push_back(cs.label);

  const ErpSeries& ref = erps.front();
  for (std::size_t ci = 0; ci < channel_sets.size(); ++ci) {
    const std::vector<std::size_t>& chs = channel_sets[ci].channels;
    if (chs.empty())
      throw std::runtime_error("ablation_grid: channel set '" + channel_sets[ci].label +
                               "' is empty");
    for (std::size_t c : chs)
      if (c >= ref.n_channels)
        throw std::runtime_error("ablation_grid: channel index out of range in set '" +
                                 channel_sets[ci].label + "'");
    for (std::size_t ti = 0; ti < time_ends_ms.size(); ++ti) {
      std::vector<std::size_t> keep_t;
      for (std::size_t t = 0; t < ref.n_timepoints; ++t)
        if (ref.time_ms(t) < time_ends_ms[ti]) keep_t.push_back(t);
      if (keep_t.empty())
        throw std::runtime_error("ablation_grid: no timepoints before " +
                                 std::to_string(time_ends_ms[ti]) + " ms");

      std::vector<ErpSeries> cut(erps.size());
      for (std::size_t i = 0; i < erps.size(); ++i) {
        ErpSeries& e = cut[i];
        e.subject_id = erps[i].subject_id;
        e.n_channels = chs.size();
        e.n_timepoints = keep_t.size();
        e.sample_rate_hz = erps[i].sample_rate_hz;
        e.start_ms = erps[i].time_ms(keep_t.front());
        e.n_trials_averaged = erps[i].n_trials_averaged;
        e.grouping = erps[i].grouping;
        e.data.resize(chs.size() * keep_t.size());
        for (std::size_t c = 0; c < chs.size(); ++c)
          for (std::size_t t = 0; t < keep_t.size(); ++t)
            e.data[c * keep_t.size() + t] = erps[i].at(chs[c], keep_t[t]);
      }
      const DecodingTimeSeries dts =
          decode_timecourse(cut, labels, seeds, cfg, oversample, threads);
      double m = 0.0;
      for (double v : dts.mean_auc) m += v;
      table.mean_auc.at(ci, ti) = m / static_cast<double>(dts.mean_auc.size());
    }
  }
  return table;
}

}  // namespace eegdec
