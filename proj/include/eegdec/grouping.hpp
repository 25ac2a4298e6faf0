#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "eegdec/dataset.hpp"

namespace eegdec {

enum class Category {
  sentence_sentiment,
  last_word_valence,
  response_type,
  response_time,
  all,
  random_split,
};

enum class Side { a, b, single };

std::string to_string(Category c);
std::string to_string(Side s);
Category category_from_string(const std::string& s);
Side side_from_string(const std::string& s);

// Which trials enter one side of a condition.
//
// Side semantics per category:
//   sentence_sentiment  a = positive, b = negative
//   last_word_valence   a = positive, b = negative
//   response_type       a = agree, b = disagree (responded trials only)
//   response_time       a = slowest ceil(rt_fraction*n) responded trials,
//                       b = fastest ceil(rt_fraction*n); stable ascending sort
//                       by response time, ties keep trial order
//   all                 every trial (side ignored)
//   random_split        seeded shuffle, first ceil(n/2) trials = side a
//
// side = single selects one labelled class directly via single_filter (a
// sentiment/valence token for the sentiment categories, agree/disagree for
// response_type), letting e.g. positive-vs-neutral contrasts be composed from
// two single selections. The random_split stream is derived from rng_seed and
// the subject id, so partitions differ across subjects but repeat exactly.
struct GroupingSpec {
  Category category = Category::all;
  Side side = Side::single;
  double rt_fraction = 0.25;       // response_time only, in (0, 0.5]
  std::uint64_t rng_seed = 0;      // random_split only
  std::string single_filter;       // side == single only
};

// Thrown when a spec matches no trials for a subject (or too few for the
// response_time quantile split); callers drop the subject from that
// condition's analysis and log the exclusion.
struct EmptySelection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-subject trial-average with enough timing to locate timepoints later.
struct ErpSeries {
  std::string subject_id;
  std::vector<double> data;  // row-major [channels][timepoints]
  std::size_t n_channels = 0;
  std::size_t n_timepoints = 0;
  double sample_rate_hz = 0.0;
  double start_ms = 0.0;
  std::size_t n_trials_averaged = 0;
  std::string grouping;

  double at(std::size_t ch, std::size_t t) const { return data[ch * n_timepoints + t]; }
  double time_ms(std::size_t t) const {
    return start_ms + static_cast<double>(t) * 1000.0 / sample_rate_hz;
  }
};

// Non-owning views into subject.trials; valid while the subject record lives.
std::vector<const EpochedTrial*> select_trials(const SubjectRecord& subject,
                                               const GroupingSpec& spec);

ErpSeries compute_erp(const std::vector<const EpochedTrial*>& trials,
                      const std::string& subject_id, const std::string& grouping);

// erp_a - erp_b for one subject; n_trials_averaged becomes the smaller count.
ErpSeries contrast(const ErpSeries& erp_a, const ErpSeries& erp_b);

// [agree|positive, disagree|positive, agree|negative, disagree|negative]
// counts over sentence sentiment, each divided by the subject's total
// responded-trial count (neutral responses enter the denominator only).
std::vector<double> behavioral_features(const SubjectRecord& subject);

}  // namespace eegdec
