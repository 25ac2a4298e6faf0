#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "eegdec/dataset.hpp"

namespace eegdec {

// Conjunction of per-field conditions on trial metadata; absent fields match
// everything, so a default-constructed filter selects all trials.
struct TrialFilter {
  std::optional<Sentiment> sentiment;
  std::optional<Sentiment> last_word_valence;
  std::optional<Response> response;

  bool matches(const TrialMeta& m) const {
    if (sentiment && m.sentiment != *sentiment) return false;
    if (last_word_valence && m.last_word_valence != *last_word_valence) return false;
    if (response && m.response != *response) return false;
    return true;
  }
};

// Additive Gaussian-windowed bump: on matching trials of affected subjects,
// each listed channel receives amp_s * exp(-(t-c)^2 / (2*sigma^2)) with
// sigma = window/6, center jittered uniformly per trial, and amp_s drawn once
// per subject from Normal(amplitude, subject_sigma).
struct EffectSpec {
  std::set<Group> groups_affected;
  TrialFilter condition;
  std::vector<std::string> channels;
  std::pair<double, double> window_ms{0.0, 0.0};
  double amplitude = 0.0;
  double latency_jitter_ms = 0.0;
  double subject_sigma = 0.0;
};

struct BehaviorSpec {
  std::map<std::pair<Group, Sentiment>, double> agree_prob;  // default 0.5
  std::map<Group, std::pair<double, double>> rt_lognormal_params;  // (mu, sigma) of log ms
  double respond_prob = 0.95;
};

struct SynthConfig {
  std::map<Group, int> n_subjects_per_group;
  int n_trials = 320;
  ChannelLayout layout;
  double sample_rate_hz = 1000.0;
  double epoch_start_ms = -200.0;
  std::size_t n_samples = 1100;
  double noise_sigma = 1.0;       // white noise on top of the 1/f background
  double background_alpha = 1.0;  // 1/f spectral exponent
  std::vector<EffectSpec> effects;
  BehaviorSpec behavior;
  std::uint64_t rng_seed = 0;
};

// Builds a layout from channel names, assigning regions by name prefix.
ChannelLayout make_layout(const std::vector<std::string>& names);

// The default 64-channel cap layout used by the preset.
ChannelLayout default_layout_64();

// Seeded synthetic cohort. Every sample is quantized to float32 precision on
// generation, so a save/load round trip reproduces the dataset bit-exactly.
// Per-subject RNG streams derive from (rng_seed, subject_id); subject-level
// parallelism cannot change the data.
Dataset generate(const SynthConfig& cfg, unsigned threads = 0);

// Full-scale configuration mirroring the reference cohort: 49/47/50 subjects
// (C/D/S), 320 trials, 64 channels at 1 kHz, epoch [-200, 900) ms, a late
// posterior effect (544-900 ms, all sentences, depressed groups) and an early
// anterior effect (256-657 ms, positive sentences only), plus group-dependent
// agreement rates and response times.
SynthConfig paper_shaped_preset();

}  // namespace eegdec
