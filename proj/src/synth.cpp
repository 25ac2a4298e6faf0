#include "eegdec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include "eegdec/parallel.hpp"
#include "eegdec/rng.hpp"

namespace eegdec {

namespace {

// FFTW plan creation is not thread-safe; execution on distinct arrays is.
// One c2r plan per signal length, created under a lock and reused.
class BackgroundFft {
 public:
  explicit BackgroundFft(std::size_t n) : n_(n) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    in_proto_ = fftw_alloc_complex(n_ / 2 + 1);
    out_proto_ = fftw_alloc_real(n_);
    plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), in_proto_, out_proto_,
                                 FFTW_ESTIMATE);
    if (!plan_) throw std::runtime_error("fftw plan creation failed");
  }
  ~BackgroundFft() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_proto_);
    fftw_free(out_proto_);
  }
  BackgroundFft(const BackgroundFft&) = delete;
  BackgroundFft& operator=(const BackgroundFft&) = delete;

  void execute(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(plan_, in, out); }
  std::size_t size() const { return n_; }

  static std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
  }

 private:
  std::size_t n_;
  fftw_complex* in_proto_;
  double* out_proto_;
  fftw_plan plan_;
};

// Working buffers for one generation worker, fftw-aligned like the plan's
// prototype arrays so the new-array execute path stays valid.
struct FftBuffers {
  fftw_complex* in;
  double* out;
  explicit FftBuffers(std::size_t n)
      : in(fftw_alloc_complex(n / 2 + 1)), out(fftw_alloc_real(n)) {}
  ~FftBuffers() {
    fftw_free(in);
    fftw_free(out);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;
};

// Unit-variance, zero-mean 1/f^alpha series: complex Gaussian half-spectrum
// with amplitudes k^(-alpha/2), inverse transformed and renormalized.
void fill_background(const BackgroundFft& fft, FftBuffers& buf, Rng& rng, double alpha,
                     double* dst) {
  const std::size_t n = fft.size();
  const std::size_t half = n / 2;
  buf.in[0][0] = 0.0;
  buf.in[0][1] = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double scale = std::pow(static_cast<double>(k), -0.5 * alpha);
    buf.in[k][0] = rng.normal() * scale;
    buf.in[k][1] = rng.normal() * scale;
  }
  if (n % 2 == 0) buf.in[half][1] = 0.0;  // Nyquist bin must be real
  fft.execute(buf.in, buf.out);

  double mean = 0.0;
  for (std::size_t t = 0; t < n; ++t) mean += buf.out[t];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double d = buf.out[t] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n);
  const double inv_sd = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
  for (std::size_t t = 0; t < n; ++t) dst[t] = (buf.out[t] - mean) * inv_sd;
}

Gender draw_gender(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.30) return Gender::male;
  if (u < 0.94) return Gender::female;
  return Gender::other;
}

std::map<std::string, int> draw_questionnaires(Rng& rng, Group g) {
  std::map<std::string, int> q;
  int phq9 = 0;
  switch (g) {
    case Group::C: phq9 = static_cast<int>(rng.uniform_int(5)); break;        // 0-4
    case Group::D: phq9 = 10 + static_cast<int>(rng.uniform_int(11)); break;  // 10-20
    case Group::S: phq9 = 12 + static_cast<int>(rng.uniform_int(12)); break;  // 12-23
  }
  q["phq9_screen"] = phq9;
  q["phq9_dayof"] =
      std::clamp(phq9 + static_cast<int>(rng.uniform_int(5)) - 2, 0, 27);
  q["gad7"] = g == Group::C ? static_cast<int>(rng.uniform_int(5))
                            : 8 + static_cast<int>(rng.uniform_int(11));
  switch (g) {
    case Group::C: q["sis"] = static_cast<int>(rng.uniform_int(11)); break;
    case Group::D: q["sis"] = 20 + static_cast<int>(rng.uniform_int(21)); break;
    case Group::S: q["sis"] = 30 + static_cast<int>(rng.uniform_int(21)); break;
  }
  return q;
}

double agree_probability(const BehaviorSpec& b, Group g, Sentiment s) {
  const auto it = b.agree_prob.find({g, s});
  return it != b.agree_prob.end() ? it->second : 0.5;
}

std::pair<double, double> rt_params(const BehaviorSpec& b, Group g) {
  const auto it = b.rt_lognormal_params.find(g);
  return it != b.rt_lognormal_params.end() ? it->second
                                           : std::pair<double, double>{std::log(800.0), 0.3};
}

}  // namespace

ChannelLayout make_layout(const std::vector<std::string>& names) {
  ChannelLayout layout;
  layout.names = names;
  for (const auto& n : names) layout.region_map[n] = region_for_channel_name(n);
  return layout;
}

ChannelLayout default_layout_64() {
  return make_layout({
      "Fp1", "Fp2", "F7",  "F3",  "Fz",  "F4",  "F8",  "FC5", "FC1", "FC2", "FC6",
      "T7",  "C3",  "Cz",  "C4",  "T8",  "TP9", "CP5", "CP1", "CP2", "CP6", "TP10",
      "P7",  "P3",  "Pz",  "P4",  "P8",  "PO9", "O1",  "Oz",  "O2",  "PO10", "AF7",
      "AF3", "AF4", "AF8", "F5",  "F1",  "F2",  "F6",  "FT9", "FT7", "FC3", "FC4",
      "FT8", "FT10", "C5", "C1",  "C2",  "C6",  "TP7", "CP3", "CPz", "CP4", "TP8",
      "P5",  "P1",  "P2",  "P6",  "PO7", "PO3", "POz", "PO4", "PO8",
  });
}

Dataset generate(const SynthConfig& cfg, unsigned threads) {
  if (cfg.layout.names.empty()) throw std::runtime_error("generate: layout has no channels");
  if (cfg.n_trials < 1) throw std::runtime_error("generate: n_trials must be >= 1");
  if (cfg.n_samples < 2) throw std::runtime_error("generate: n_samples must be >= 2");
  if (!(cfg.noise_sigma > 0.0)) throw std::runtime_error("generate: noise_sigma must be > 0");
  for (const auto& [g, n] : cfg.n_subjects_per_group)
    if (n < 0) throw std::runtime_error("generate: negative subject count");

  // Resolve effect channel names once, up front.
  struct ResolvedEffect {
    const EffectSpec* spec;
    std::vector<std::size_t> channels;
    double sigma_ms;
    double center_ms;
  };
  std::vector<ResolvedEffect> effects;
  for (const EffectSpec& e : cfg.effects) {
    ResolvedEffect r;
    r.spec = &e;
    r.channels = cfg.layout.indices_for_names(e.channels);
    r.sigma_ms = (e.window_ms.second - e.window_ms.first) / 6.0;
    r.center_ms = 0.5 * (e.window_ms.first + e.window_ms.second);
    if (r.sigma_ms <= 0.0)
      throw std::runtime_error("generate: effect window must have positive length");
    effects.push_back(r);
  }

  Dataset ds;
  ds.layout = cfg.layout;
  ds.provenance = "synthgen seed=" + std::to_string(cfg.rng_seed);

  struct SubjectPlan {
    std::string id;
    Group group;
  };
  std::vector<SubjectPlan> plan;
  for (const auto& [g, count] : cfg.n_subjects_per_group) {
    for (int i = 0; i < count; ++i) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%s%03d", to_string(g).c_str(), i + 1);
      plan.push_back({buf, g});
    }
  }
  ds.subjects.resize(plan.size());

  const BackgroundFft fft(cfg.n_samples);
  const std::size_t n_ch = cfg.layout.size();
  const std::size_t n_samp = cfg.n_samples;
  const double dt_ms = 1000.0 / cfg.sample_rate_hz;

  parallel_for(plan.size(), [&](std::size_t si) {
    Rng rng(seed_mix(cfg.rng_seed, hash_str(plan[si].id)));
    SubjectRecord& sub = ds.subjects[si];
    sub.subject_id = plan[si].id;
    sub.group = plan[si].group;
    sub.gender = draw_gender(rng);
    sub.questionnaires = draw_questionnaires(rng, sub.group);

    // One amplitude per subject per effect, drawn whether or not the effect
    // targets this subject's group: keeps the draw sequence identical across
    // configs that differ only in amplitudes.
    std::vector<double> subject_amp(effects.size());
    for (std::size_t ei = 0; ei < effects.size(); ++ei)
      subject_amp[ei] =
          effects[ei].spec->amplitude + effects[ei].spec->subject_sigma * rng.normal();

    FftBuffers buf(n_samp);
    std::vector<double> bg(n_samp);
    const auto [rt_mu, rt_sigma] = rt_params(cfg.behavior, sub.group);

    sub.trials.resize(static_cast<std::size_t>(cfg.n_trials));
    for (int ti = 0; ti < cfg.n_trials; ++ti) {
      EpochedTrial& tr = sub.trials[static_cast<std::size_t>(ti)];
      tr.n_channels = n_ch;
      tr.n_samples = n_samp;
      tr.sample_rate_hz = cfg.sample_rate_hz;
      tr.epoch_start_ms = cfg.epoch_start_ms;

      TrialMeta& m = tr.meta;
      m.sentence_id = ti;
      constexpr Sentiment kSentiments[3] = {Sentiment::positive, Sentiment::negative,
                                            Sentiment::neutral};
      m.sentiment = kSentiments[rng.uniform_int(3)];
      m.last_word_valence = kSentiments[rng.uniform_int(3)];
      if (rng.uniform() < cfg.behavior.respond_prob) {
        const double p_agree = agree_probability(cfg.behavior, sub.group, m.sentiment);
        m.response = rng.uniform() < p_agree ? Response::agree : Response::disagree;
        m.response_time_ms = std::exp(rt_mu + rt_sigma * rng.normal());
      } else {
        m.response = Response::none;
      }

      // Which effects hit this trial, and where their centers land.
      struct ActiveBump {
        const ResolvedEffect* eff;
        double amp;
        double center;
      };
      std::vector<ActiveBump> bumps;
      for (std::size_t ei = 0; ei < effects.size(); ++ei) {
        const ResolvedEffect& r = effects[ei];
        if (!r.spec->groups_affected.count(sub.group)) continue;
        if (!r.spec->condition.matches(m)) continue;
        const double jitter =
            r.spec->latency_jitter_ms * (2.0 * rng.uniform() - 1.0);
        bumps.push_back({&r, subject_amp[ei], r.center_ms + jitter});
      }

      tr.data.resize(n_ch * n_samp);
      for (std::size_t c = 0; c < n_ch; ++c) {
        fill_background(fft, buf, rng, cfg.background_alpha, bg.data());
        double* dst = tr.data.data() + c * n_samp;
        for (std::size_t t = 0; t < n_samp; ++t)
          dst[t] = bg[t] + cfg.noise_sigma * rng.normal();
        for (const ActiveBump& bump : bumps) {
          if (std::find(bump.eff->channels.begin(), bump.eff->channels.end(), c) ==
              bump.eff->channels.end())
            continue;
          const double s2 = 2.0 * bump.eff->sigma_ms * bump.eff->sigma_ms;
          // Gaussian support effectively ends beyond 5 sigma; skip the rest.
          const double lo = bump.center - 5.0 * bump.eff->sigma_ms;
          const double hi = bump.center + 5.0 * bump.eff->sigma_ms;
          for (std::size_t t = 0; t < n_samp; ++t) {
            const double tm = cfg.epoch_start_ms + static_cast<double>(t) * dt_ms;
            if (tm < lo || tm > hi) continue;
            const double d = tm - bump.center;
            dst[t] += bump.amp * std::exp(-d * d / s2);
          }
        }
        // float32 quantization: the on-disk format stores float32, so
        // quantizing here makes save/load round trips bit-exact.
        for (std::size_t t = 0; t < n_samp; ++t)
          dst[t] = static_cast<double>(static_cast<float>(dst[t]));
      }
    }
  }, threads);

  return ds;
}

SynthConfig paper_shaped_preset() {
  SynthConfig cfg;
  cfg.n_subjects_per_group = {{Group::C, 49}, {Group::D, 47}, {Group::S, 50}};
  cfg.n_trials = 320;
  cfg.layout = default_layout_64();
  cfg.sample_rate_hz = 1000.0;
  cfg.epoch_start_ms = -200.0;
  cfg.n_samples = 1100;  // [-200, 900) ms at 1 kHz
  cfg.noise_sigma = 1.0;
  cfg.background_alpha = 1.0;
  cfg.rng_seed = 1;

  // Late posterior effect on every sentence, depressed groups only.
  EffectSpec late;
  late.groups_affected = {Group::D, Group::S};
  late.channels = {"Pz", "P3", "P4", "POz", "PO3", "PO4", "O1", "Oz", "O2"};
  late.window_ms = {544.0, 900.0};
  late.amplitude = 1.5;
  late.latency_jitter_ms = 20.0;
  late.subject_sigma = 0.2;
  cfg.effects.push_back(late);

  // Earlier anterior effect carried by positive sentences only, so it appears
  // in sentiment contrasts.
  EffectSpec early;
  early.groups_affected = {Group::D, Group::S};
  early.condition.sentiment = Sentiment::positive;
  early.channels = {"Fp1", "Fp2", "AF3", "AF4", "F3", "Fz", "F4"};
  early.window_ms = {256.0, 657.0};
  early.amplitude = 1.0;
  early.latency_jitter_ms = 20.0;
  early.subject_sigma = 0.2;
  cfg.effects.push_back(early);

  BehaviorSpec& b = cfg.behavior;
  b.respond_prob = 0.95;
  b.agree_prob[{Group::C, Sentiment::positive}] = 0.80;
  b.agree_prob[{Group::C, Sentiment::negative}] = 0.20;
  b.agree_prob[{Group::C, Sentiment::neutral}] = 0.50;
  for (Group g : {Group::D, Group::S}) {
    b.agree_prob[{g, Sentiment::positive}] = 0.40;
    b.agree_prob[{g, Sentiment::negative}] = 0.70;
    b.agree_prob[{g, Sentiment::neutral}] = 0.50;
  }
  b.rt_lognormal_params[Group::C] = {std::log(700.0), 0.30};
  b.rt_lognormal_params[Group::D] = {std::log(900.0), 0.35};
  b.rt_lognormal_params[Group::S] = {std::log(900.0), 0.35};
  return cfg;
}

}  // namespace eegdec
