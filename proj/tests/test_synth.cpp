#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include "doctest.h"
#include "eegdec/dataset.hpp"
#include "eegdec/synth.hpp"

using namespace eegdec;

namespace {

SynthConfig tiny_config() {
  SynthConfig cfg;
  cfg.n_subjects_per_group = {{Group::C, 2}, {Group::D, 2}};
  cfg.n_trials = 12;
  cfg.layout = make_layout({"Fz", "Cz", "Pz"});
  cfg.sample_rate_hz = 500.0;
  cfg.epoch_start_ms = -100.0;
  cfg.n_samples = 150;
  cfg.rng_seed = 11;
  return cfg;
}

bool datasets_equal(const Dataset& a, const Dataset& b) {
  if (a.subjects.size() != b.subjects.size()) return false;
  for (std::size_t s = 0; s < a.subjects.size(); ++s) {
    const auto& sa = a.subjects[s];
    const auto& sb = b.subjects[s];
    if (sa.subject_id != sb.subject_id || sa.group != sb.group ||
        sa.gender != sb.gender || sa.questionnaires != sb.questionnaires)
      return false;
    if (sa.trials.size() != sb.trials.size()) return false;
    for (std::size_t t = 0; t < sa.trials.size(); ++t) {
      const auto& ta = sa.trials[t];
      const auto& tb = sb.trials[t];
      if (ta.data != tb.data) return false;
      if (ta.meta.sentiment != tb.meta.sentiment ||
          ta.meta.last_word_valence != tb.meta.last_word_valence ||
          ta.meta.response != tb.meta.response ||
          ta.meta.sentence_id != tb.meta.sentence_id ||
          ta.meta.response_time_ms != tb.meta.response_time_ms)
        return false;
    }
  }
  return true;
}

// Least-squares slope of log10(power) against log10(bin) for one average
// periodogram, over DFT bins [k_lo, k_hi].
double log_log_slope(const std::vector<double>& power, std::size_t k_lo, std::size_t k_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = 0;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    const double x = std::log10(static_cast<double>(k));
    const double y = std::log10(power[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1.0;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Direct O(n^2) DFT magnitude-squared for bins 1..k_max; deliberately naive so
// the generator's FFT path is checked against an independent transform.
std::vector<double> periodogram(const double* x, std::size_t n, std::size_t k_max) {
  std::vector<double> p(k_max + 1, 0.0);
  for (std::size_t k = 1; k <= k_max; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double ph = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) /
                        static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    p[k] = std::norm(acc);
  }
  return p;
}

}  // namespace

TEST_CASE("generation is bit-identical per seed and across thread counts") {
  const SynthConfig cfg = tiny_config();
  const Dataset a = generate(cfg, 1);
  const Dataset b = generate(cfg, 1);
  const Dataset c = generate(cfg, 3);
  CHECK(datasets_equal(a, b));
  CHECK(datasets_equal(a, c));

  SynthConfig other = cfg;
  other.rng_seed = 12;
  CHECK_FALSE(datasets_equal(a, generate(other, 1)));
}

TEST_CASE("generated cohorts pass dataset validation") {
  const Dataset ds = generate(tiny_config(), 1);
  CHECK(validate(ds).empty());
  REQUIRE(ds.subjects.size() == 4);
  for (const auto& sub : ds.subjects) {
    CHECK(sub.trials.size() == 12);
    for (std::size_t ti = 0; ti < sub.trials.size(); ++ti) {
      const auto& tr = sub.trials[ti];
      CHECK(tr.n_channels == 3);
      CHECK(tr.n_samples == 150);
      CHECK(tr.meta.sentence_id == static_cast<int>(ti));
    }
  }
}

TEST_CASE("every sample is exactly representable in float32") {
  const Dataset ds = generate(tiny_config(), 1);
  for (const auto& sub : ds.subjects)
    for (const auto& tr : sub.trials)
      for (double v : tr.data)
        CHECK(v == static_cast<double>(static_cast<float>(v)));
}

TEST_CASE("background spectrum follows the requested power-law exponent") {
  for (double alpha : {1.0, 1.8}) {
    SynthConfig cfg;
    cfg.n_subjects_per_group = {{Group::C, 1}};
    cfg.n_trials = 100;
    cfg.layout = make_layout({"Cz"});
    cfg.sample_rate_hz = 1000.0;
    cfg.epoch_start_ms = 0.0;
    cfg.n_samples = 256;
    cfg.noise_sigma = 1e-6;  // background dominates the spectrum
    cfg.background_alpha = alpha;
    cfg.rng_seed = 21;
    const Dataset ds = generate(cfg, 1);

    const std::size_t k_max = 32;
    std::vector<double> avg(k_max + 1, 0.0);
    for (const auto& tr : ds.subjects[0].trials) {
      const auto p = periodogram(tr.data.data(), cfg.n_samples, k_max);
      for (std::size_t k = 1; k <= k_max; ++k) avg[k] += p[k];
    }
    const double slope = log_log_slope(avg, 2, k_max);
    CHECK(std::abs(slope + alpha) <= 0.3);
  }
}

TEST_CASE("injected effects add the configured bump and nothing else") {
  SynthConfig base;
  base.n_subjects_per_group = {{Group::C, 1}, {Group::D, 1}};
  base.n_trials = 5;
  base.layout = make_layout({"Cz", "Pz"});
  base.sample_rate_hz = 1000.0;
  base.epoch_start_ms = -200.0;
  base.n_samples = 1000;  // [-200, 800) ms
  base.rng_seed = 31;
  EffectSpec eff;
  eff.groups_affected = {Group::D};
  eff.channels = {"Pz"};
  eff.window_ms = {200.0, 500.0};  // sigma 50 ms, center 350 ms
  eff.amplitude = 0.0;
  base.effects = {eff};

  auto with_amp = [&](double a) {
    SynthConfig c = base;
    c.effects[0].amplitude = a;
    return generate(c, 1);
  };
  const Dataset d0 = with_amp(0.0);
  const Dataset d2 = with_amp(2.0);
  const Dataset d4 = with_amp(4.0);

  std::size_t ctrl = d0.subjects[0].group == Group::C ? 0 : 1;
  const std::size_t dep = 1 - ctrl;

  // Unaffected group, unaffected channel, and samples beyond 5 sigma of the
  // bump center match bit-for-bit: the amplitude only touches the bump.
  for (std::size_t ti = 0; ti < 5; ++ti) {
    CHECK(d0.subjects[ctrl].trials[ti].data == d2.subjects[ctrl].trials[ti].data);
    const auto& t0 = d0.subjects[dep].trials[ti];
    const auto& t2 = d2.subjects[dep].trials[ti];
    const auto& t4 = d4.subjects[dep].trials[ti];
    for (std::size_t s = 0; s < 1000; ++s)
      CHECK(t0.data[s] == t2.data[s]);  // Cz row
    for (std::size_t s = 0; s < 1000; ++s) {
      const double tm = -200.0 + static_cast<double>(s);
      if (tm < 100.0 || tm > 600.0) {
        CHECK(t0.data[1000 + s] == t2.data[1000 + s]);
      }
    }
    // At the center sample the bump equals the amplitude, and doubling the
    // amplitude doubles the added signal.
    const std::size_t c = 550;  // t = 350 ms
    CHECK(t2.data[1000 + c] - t0.data[1000 + c] == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(t4.data[1000 + c] - t0.data[1000 + c] == doctest::Approx(4.0).epsilon(1e-3));
  }
}

TEST_CASE("conditional effects hit only matching trials") {
  SynthConfig cfg;
  cfg.n_subjects_per_group = {{Group::D, 1}};
  cfg.n_trials = 60;
  cfg.layout = make_layout({"Pz"});
  cfg.sample_rate_hz = 1000.0;
  cfg.epoch_start_ms = -200.0;
  cfg.n_samples = 1000;
  cfg.noise_sigma = 0.5;
  cfg.rng_seed = 41;
  EffectSpec eff;
  eff.groups_affected = {Group::D};
  eff.condition.sentiment = Sentiment::positive;
  eff.channels = {"Pz"};
  eff.window_ms = {200.0, 500.0};
  eff.amplitude = 50.0;
  cfg.effects = {eff};
  const Dataset ds = generate(cfg, 1);

  int n_pos = 0;
  for (const auto& tr : ds.subjects[0].trials) {
    const double v = tr.data[550];  // bump center
    if (tr.meta.sentiment == Sentiment::positive) {
      ++n_pos;
      CHECK(v > 25.0);
    } else {
      CHECK(v < 25.0);
    }
  }
  CHECK(n_pos > 0);
}

TEST_CASE("behavioral metadata follows the configured probabilities") {
  SynthConfig cfg;
  cfg.n_subjects_per_group = {{Group::C, 1}};
  cfg.n_trials = 3000;
  cfg.layout = make_layout({"Cz"});
  cfg.n_samples = 2;
  cfg.sample_rate_hz = 1000.0;
  cfg.rng_seed = 51;
  cfg.behavior.respond_prob = 0.7;
  cfg.behavior.agree_prob[{Group::C, Sentiment::positive}] = 0.9;
  cfg.behavior.agree_prob[{Group::C, Sentiment::negative}] = 0.1;
  cfg.behavior.rt_lognormal_params[Group::C] = {std::log(600.0), 0.25};
  const Dataset ds = generate(cfg, 1);
  const auto& trials = ds.subjects[0].trials;

  std::map<Sentiment, int> sentiment_count;
  int responded = 0;
  std::map<Sentiment, std::pair<int, int>> agree_of;  // (agree, responded)
  double log_rt = 0.0;
  for (const auto& tr : trials) {
    ++sentiment_count[tr.meta.sentiment];
    if (tr.meta.response == Response::none) {
      CHECK_FALSE(tr.meta.response_time_ms.has_value());
      continue;
    }
    ++responded;
    REQUIRE(tr.meta.response_time_ms.has_value());
    CHECK(*tr.meta.response_time_ms > 0.0);
    log_rt += std::log(*tr.meta.response_time_ms);
    auto& [agr, tot] = agree_of[tr.meta.sentiment];
    ++tot;
    if (tr.meta.response == Response::agree) ++agr;
  }

  for (Sentiment s : {Sentiment::positive, Sentiment::negative, Sentiment::neutral})
    CHECK(std::abs(sentiment_count[s] / 3000.0 - 1.0 / 3.0) < 0.05);
  CHECK(std::abs(responded / 3000.0 - 0.7) < 0.05);
  const auto [agr_p, tot_p] = agree_of[Sentiment::positive];
  const auto [agr_n, tot_n] = agree_of[Sentiment::negative];
  const auto [agr_u, tot_u] = agree_of[Sentiment::neutral];
  CHECK(std::abs(static_cast<double>(agr_p) / tot_p - 0.9) < 0.05);
  CHECK(std::abs(static_cast<double>(agr_n) / tot_n - 0.1) < 0.05);
  CHECK(std::abs(static_cast<double>(agr_u) / tot_u - 0.5) < 0.06);  // default 0.5
  CHECK(std::abs(log_rt / responded - std::log(600.0)) < 3.0 * 0.25 / std::sqrt(responded));
}

TEST_CASE("the full-scale preset matches the reference cohort shape") {
  const SynthConfig cfg = paper_shaped_preset();
  CHECK(cfg.n_subjects_per_group.at(Group::C) == 49);
  CHECK(cfg.n_subjects_per_group.at(Group::D) == 47);
  CHECK(cfg.n_subjects_per_group.at(Group::S) == 50);
  CHECK(cfg.n_trials == 320);
  CHECK(cfg.layout.size() == 64);
  CHECK(cfg.sample_rate_hz == 1000.0);
  CHECK(cfg.n_samples == 1100);
  CHECK(cfg.epoch_start_ms == -200.0);
  CHECK(cfg.effects.size() == 2);
  CHECK(cfg.behavior.respond_prob == 0.95);
}

TEST_CASE("configuration errors are rejected up front") {
  SynthConfig cfg = tiny_config();
  cfg.layout = ChannelLayout{};
  CHECK_THROWS_AS((void)generate(cfg, 1), std::exception);

  cfg = tiny_config();
  cfg.n_trials = 0;
  CHECK_THROWS_AS((void)generate(cfg, 1), std::exception);

  cfg = tiny_config();
  cfg.noise_sigma = 0.0;
  CHECK_THROWS_AS((void)generate(cfg, 1), std::exception);

  cfg = tiny_config();
  EffectSpec eff;
  eff.groups_affected = {Group::C};
  eff.channels = {"Cz"};
  eff.window_ms = {300.0, 300.0};  // zero length
  eff.amplitude = 1.0;
  cfg.effects = {eff};
  CHECK_THROWS_AS((void)generate(cfg, 1), std::exception);

  cfg = tiny_config();
  eff.window_ms = {100.0, 300.0};
  eff.channels = {"NoSuchChannel"};
  cfg.effects = {eff};
  CHECK_THROWS_AS((void)generate(cfg, 1), std::exception);
}
