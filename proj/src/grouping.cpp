#include "eegdec/grouping.hpp"

#include <algorithm>
#include <cmath>

#include "eegdec/rng.hpp"

namespace eegdec {

std::string to_string(Category c) {
  switch (c) {
    case Category::sentence_sentiment: return "sentence_sentiment";
    case Category::last_word_valence: return "last_word_valence";
    case Category::response_type: return "response_type";
    case Category::response_time: return "response_time";
    case Category::all: return "all";
    case Category::random_split: return "random_split";
  }
  return "?";
}

std::string to_string(Side s) {
  switch (s) {
    case Side::a: return "a";
    case Side::b: return "b";
    case Side::single: return "single";
  }
  return "?";
}

Category category_from_string(const std::string& s) {
  if (s == "sentence_sentiment") return Category::sentence_sentiment;
  if (s == "last_word_valence") return Category::last_word_valence;
  if (s == "response_type") return Category::response_type;
  if (s == "response_time") return Category::response_time;
  if (s == "all") return Category::all;
  if (s == "random_split") return Category::random_split;
  throw std::runtime_error("unknown grouping category token: '" + s + "'");
}

Side side_from_string(const std::string& s) {
  if (s == "a") return Side::a;
  if (s == "b") return Side::b;
  if (s == "single") return Side::single;
  throw std::runtime_error("unknown grouping side token: '" + s + "'");
}

namespace {

Sentiment sentiment_side(const GroupingSpec& spec) {
  if (spec.side == Side::a) return Sentiment::positive;
  if (spec.side == Side::b) return Sentiment::negative;
  return sentiment_from_string(spec.single_filter);
}

std::vector<std::size_t> responded_indices(const SubjectRecord& subject) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < subject.trials.size(); ++i)
    if (subject.trials[i].meta.response != Response::none) out.push_back(i);
  return out;
}

std::vector<std::size_t> select_indices(const SubjectRecord& subject,
                                        const GroupingSpec& spec) {
  std::vector<std::size_t> out;
  const auto& trials = subject.trials;
  switch (spec.category) {
    case Category::all: {
      out.resize(trials.size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
      break;
    }
    case Category::sentence_sentiment: {
      const Sentiment want = sentiment_side(spec);
      for (std::size_t i = 0; i < trials.size(); ++i)
        if (trials[i].meta.sentiment == want) out.push_back(i);
      break;
    }
    case Category::last_word_valence: {
      const Sentiment want = sentiment_side(spec);
      for (std::size_t i = 0; i < trials.size(); ++i)
        if (trials[i].meta.last_word_valence == want) out.push_back(i);
      break;
    }
    case Category::response_type: {
      Response want;
      if (spec.side == Side::a) want = Response::agree;
      else if (spec.side == Side::b) want = Response::disagree;
      else want = response_from_string(spec.single_filter);
      if (want == Response::none)
        throw std::runtime_error("response_type cannot select non-responses");
      for (std::size_t i = 0; i < trials.size(); ++i)
        if (trials[i].meta.response == want) out.push_back(i);
      break;
    }
    case Category::response_time: {
      if (spec.side == Side::single)
        throw std::runtime_error("response_time needs side a (slow) or b (fast)");
      if (!(spec.rt_fraction > 0.0 && spec.rt_fraction <= 0.5))
        throw std::runtime_error("rt_fraction must lie in (0, 0.5]");
      std::vector<std::size_t> resp = responded_indices(subject);
      const std::size_t n = resp.size();
      const auto m = static_cast<std::size_t>(
          std::ceil(spec.rt_fraction * static_cast<double>(n)));
      // Head and tail of one stable ascending sort: keeps the two quantile
      // groups disjoint and makes tie handling a function of trial order only.
      if (m == 0 || 2 * m > n)
        throw EmptySelection("subject " + subject.subject_id +
                             ": too few responded trials (" + std::to_string(n) +
                             ") for a " + std::to_string(spec.rt_fraction) +
                             " response-time split");
      std::stable_sort(resp.begin(), resp.end(), [&](std::size_t x, std::size_t y) {
        return *trials[x].meta.response_time_ms < *trials[y].meta.response_time_ms;
      });
      if (spec.side == Side::a)
        out.assign(resp.end() - static_cast<std::ptrdiff_t>(m), resp.end());
      else
        out.assign(resp.begin(), resp.begin() + static_cast<std::ptrdiff_t>(m));
      std::sort(out.begin(), out.end());
      break;
    }
    case Category::random_split: {
      if (spec.side == Side::single)
        throw std::runtime_error("random_split needs side a or b");
      std::vector<std::size_t> idx(trials.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      Rng rng(seed_mix(spec.rng_seed, hash_str(subject.subject_id)));
      rng.shuffle(idx);
      const std::size_t half = (idx.size() + 1) / 2;
      if (spec.side == Side::a)
        out.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(half));
      else
        out.assign(idx.begin() + static_cast<std::ptrdiff_t>(half), idx.end());
      std::sort(out.begin(), out.end());
      break;
    }
  }
  if (out.empty())
    throw EmptySelection("subject " + subject.subject_id + ": no trials match " +
                         to_string(spec.category) + " side " + to_string(spec.side));
  return out;
}

}  // namespace

std::vector<const EpochedTrial*> select_trials(const SubjectRecord& subject,
                                               const GroupingSpec& spec) {
  std::vector<const EpochedTrial*> out;
  for (std::size_t i : select_indices(subject, spec)) out.push_back(&subject.trials[i]);
  return out;
}

ErpSeries compute_erp(const std::vector<const EpochedTrial*>& trials,
                      const std::string& subject_id, const std::string& grouping) {
  if (trials.empty()) throw std::runtime_error("compute_erp: no trials");
  const EpochedTrial& first = *trials.front();
  for (const EpochedTrial* tr : trials) {
    if (tr->n_channels != first.n_channels || tr->n_samples != first.n_samples ||
        tr->sample_rate_hz != first.sample_rate_hz ||
        tr->epoch_start_ms != first.epoch_start_ms)
      throw std::runtime_error("compute_erp: trial shapes differ");
  }
  ErpSeries erp;
  erp.subject_id = subject_id;
  erp.n_channels = first.n_channels;
  erp.n_timepoints = first.n_samples;
  erp.sample_rate_hz = first.sample_rate_hz;
  erp.start_ms = first.epoch_start_ms;
  erp.n_trials_averaged = trials.size();
  erp.grouping = grouping;
  erp.data.assign(first.data.size(), 0.0);
  for (const EpochedTrial* tr : trials)
    for (std::size_t i = 0; i < erp.data.size(); ++i) erp.data[i] += tr->data[i];
  const double inv = 1.0 / static_cast<double>(trials.size());
  for (double& v : erp.data) v *= inv;
  return erp;
}

ErpSeries contrast(const ErpSeries& erp_a, const ErpSeries& erp_b) {
  if (erp_a.subject_id != erp_b.subject_id)
    throw std::runtime_error("contrast: ERPs belong to different subjects ('" +
                             erp_a.subject_id + "' vs '" + erp_b.subject_id + "')");
  if (erp_a.n_channels != erp_b.n_channels || erp_a.n_timepoints != erp_b.n_timepoints)
    throw std::runtime_error("contrast: ERP shapes differ");
  ErpSeries out = erp_a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= erp_b.data[i];
  out.n_trials_averaged = std::min(erp_a.n_trials_averaged, erp_b.n_trials_averaged);
  out.grouping = erp_a.grouping + "-" + erp_b.grouping;
  return out;
}

std::vector<double> behavioral_features(const SubjectRecord& subject) {
  double n_resp = 0.0;
  double counts[4] = {0.0, 0.0, 0.0, 0.0};
  for (const auto& tr : subject.trials) {
    const auto& m = tr.meta;
    if (m.response == Response::none) continue;
    n_resp += 1.0;
    const bool agree = m.response == Response::agree;
    if (m.sentiment == Sentiment::positive)
      counts[agree ? 0 : 1] += 1.0;
    else if (m.sentiment == Sentiment::negative)
      counts[agree ? 2 : 3] += 1.0;
  }
  if (n_resp == 0.0)
    throw std::runtime_error("subject " + subject.subject_id + " has no responded trials");
  return {counts[0] / n_resp, counts[1] / n_resp, counts[2] / n_resp, counts[3] / n_resp};
}

}  // namespace eegdec
