// eegdec: reproducible EEG decoding experiments driven by one JSON config.
//
// Subcommands: synth | decode | classify | transfer | ablate | behavioral |
//              correlate | validate
// Exit codes: 0 success, 2 config error, 3 data error, 4 internal error.
//
// Every run writes run_meta.json (config echo + seed + version) into the
// output directory. Outputs are deterministic functions of (config, seed) and
// do not depend on --threads.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eegdec/cluster.hpp"
#include "eegdec/dataset.hpp"
#include "eegdec/grouping.hpp"
#include "eegdec/logreg.hpp"
#include "eegdec/mvpa.hpp"
#include "eegdec/prep.hpp"
#include "eegdec/report.hpp"
#include "eegdec/rng.hpp"
#include "eegdec/stats.hpp"
#include "eegdec/subject_clf.hpp"
#include "eegdec/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace eegdec;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- config I/O

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
  std::ifstream f(path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
}

// --set a.b.c=VALUE; VALUE parsed as JSON when possible, else kept as string.
void apply_set_overrides(json& cfg, const std::vector<std::string>& sets) {
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;
    }
    json* node = &cfg;
    std::size_t pos = 0;
    for (;;) {
      const auto dot = key.find('.', pos);
      const std::string part = key.substr(pos, dot - pos);
      if (part.empty()) throw ConfigError("--set key has an empty path segment: " + key);
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      pos = dot + 1;
    }
  }
}

const json& subsection(const json& cfg, const std::string& name) {
  static const json empty = json::object();
  const auto it = cfg.find(name);
  if (it == cfg.end()) return empty;
  if (!it->is_object()) throw ConfigError("config field '" + name + "' must be an object");
  return *it;
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + key + "' has the wrong type");
  }
}

// ------------------------------------------------------------ config parsing

PrepConfig parse_prep(const json& j) {
  PrepConfig p;
  if (j.contains("baseline_window_ms")) {
    const auto w = j.at("baseline_window_ms").get<std::vector<double>>();
    if (w.size() != 2) throw ConfigError("prep.baseline_window_ms must be [start, end]");
    p.baseline_window_ms = {w[0], w[1]};
  }
  if (j.contains("target_rate_hz") && !j.at("target_rate_hz").is_null())
    p.target_rate_hz = j.at("target_rate_hz").get<double>();
  p.mvpa_window_ms = get_or(j, "mvpa_window_ms", p.mvpa_window_ms);
  p.std_floor = get_or(j, "std_floor", p.std_floor);
  return p;
}

GroupingSpec parse_grouping(const json& j, std::uint64_t base_seed) {
  GroupingSpec g;
  try {
    g.category = category_from_string(get_or<std::string>(j, "category", "all"));
    g.side = side_from_string(get_or<std::string>(j, "side", "single"));
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("grouping: ") + e.what());
  }
  g.rt_fraction = get_or(j, "rt_fraction", g.rt_fraction);
  g.rng_seed = get_or<std::uint64_t>(j, "rng_seed", seed_mix(base_seed, 0x5EED));
  g.single_filter = get_or<std::string>(j, "filter", "");
  return g;
}

std::vector<GroupingSpec> parse_groupings(const json& j, const std::string& key,
                                          std::uint64_t base_seed) {
  std::vector<GroupingSpec> out;
  if (!j.contains(key)) {
    out.push_back(GroupingSpec{});  // category all
    return out;
  }
  const json& arr = j.at(key);
  if (!arr.is_array() || arr.empty() || arr.size() > 2)
    throw ConfigError("'" + key + "' must be an array of one or two grouping specs");
  for (const json& g : arr) out.push_back(parse_grouping(g, base_seed));
  return out;
}

FitConfig parse_fit(const json& j, double default_init_jitter) {
  FitConfig f;
  f.lambda = get_or(j, "lambda", f.lambda);
  f.max_iter = get_or(j, "max_iter", f.max_iter);
  f.tol = get_or(j, "tol", f.tol);
  f.standardize = get_or(j, "standardize", f.standardize);
  f.init_jitter = get_or(j, "init_jitter", default_init_jitter);
  if (f.lambda < 0 || f.max_iter < 1 || f.tol <= 0)
    throw ConfigError("fit: lambda >= 0, max_iter >= 1, tol > 0 required");
  return f;
}

ClusterConfig parse_cluster(const json& j, std::uint64_t base_seed) {
  ClusterConfig c;
  c.n_perm = get_or(j, "n_perm", c.n_perm);
  c.alpha = get_or(j, "alpha", c.alpha);
  c.cluster_threshold_p = get_or(j, "cluster_threshold_p", c.cluster_threshold_p);
  c.min_cluster_ms = get_or(j, "min_cluster_ms", c.min_cluster_ms);
  c.rng_seed = get_or<std::uint64_t>(j, "rng_seed", seed_mix(base_seed, 0xC1));
  if (c.n_perm < 100) throw ConfigError("cluster.n_perm must be >= 100");
  if (!(c.alpha > 0 && c.alpha < 1) || !(c.cluster_threshold_p > 0 && c.cluster_threshold_p < 1))
    throw ConfigError("cluster thresholds must lie in (0, 1)");
  return c;
}

std::set<Group> parse_group_set(const json& arr, const std::string& what) {
  if (!arr.is_array() || arr.empty())
    throw ConfigError("'" + what + "' must be a non-empty array of group names");
  std::set<Group> out;
  for (const json& g : arr) {
    try {
      out.insert(group_from_string(g.get<std::string>()));
    } catch (const std::runtime_error& e) {
      throw ConfigError(what + ": " + e.what());
    }
  }
  return out;
}

// {"negative": [...], "positive": [...]}; positive is class 1.
std::pair<std::set<Group>, std::set<Group>> parse_classes(const json& j) {
  if (!j.contains("negative") || !j.contains("positive"))
    throw ConfigError("classes need 'negative' and 'positive' group arrays");
  return {parse_group_set(j.at("negative"), "classes.negative"),
          parse_group_set(j.at("positive"), "classes.positive")};
}

ClassifierSpec parse_classifier(const json& j) {
  ClassifierSpec spec;
  try {
    spec.kind = classifier_kind_from_string(get_or<std::string>(j, "kind", "sparse_logreg"));
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("classifier: ") + e.what());
  }
  if (j.contains("hyperparams"))
    for (const auto& [k, v] : j.at("hyperparams").items())
      spec.hyperparams[k] = v.get<double>();
  return spec;
}

BootstrapConfig parse_bootstrap(const json& j, std::uint64_t base_seed) {
  BootstrapConfig b;
  b.n_boot = get_or(j, "n_boot", b.n_boot);
  b.trials_per_boot = get_or(j, "trials_per_boot", b.trials_per_boot);
  b.rng_seed = get_or<std::uint64_t>(j, "rng_seed", base_seed);
  try {
    b.cv = cv_scheme_from_string(
        get_or<std::string>(j, "cv", "five_fold_stratified_gender"));
    b.target_label = target_label_from_string(get_or<std::string>(j, "target_label", "group"));
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("bootstrap: ") + e.what());
  }
  b.oversample_minority = get_or(j, "oversample_minority", b.oversample_minority);
  if (j.contains("resample_rate_hz")) {
    if (j.at("resample_rate_hz").is_null()) b.resample_rate_hz.reset();
    else b.resample_rate_hz = j.at("resample_rate_hz").get<double>();
  }
  b.validation_fraction = get_or(j, "validation_fraction", b.validation_fraction);
  b.n_candidates = get_or(j, "n_candidates", b.n_candidates);
  if (b.n_boot < 1 || b.trials_per_boot < 1)
    throw ConfigError("bootstrap: n_boot and trials_per_boot must be >= 1");
  return b;
}

Sentiment parse_sentiment_field(const json& j, const std::string& key) {
  try {
    return sentiment_from_string(j.at(key).get<std::string>());
  } catch (const std::runtime_error& e) {
    throw ConfigError("effect condition: " + std::string(e.what()));
  }
}

SynthConfig parse_synth(const json& j, const std::string& preset, std::uint64_t base_seed) {
  SynthConfig cfg;
  if (!preset.empty()) {
    if (preset != "paper") throw ConfigError("unknown synth preset: " + preset);
    cfg = paper_shaped_preset();
  } else {
    cfg.layout = default_layout_64();
  }
  cfg.rng_seed = base_seed;

  if (j.contains("n_subjects_per_group")) {
    cfg.n_subjects_per_group.clear();
    for (const auto& [k, v] : j.at("n_subjects_per_group").items())
      cfg.n_subjects_per_group[group_from_string(k)] = v.get<int>();
  }
  cfg.n_trials = get_or(j, "n_trials", cfg.n_trials);
  if (j.contains("channels"))
    cfg.layout = make_layout(j.at("channels").get<std::vector<std::string>>());
  else if (j.contains("n_channels")) {
    const auto k = j.at("n_channels").get<std::size_t>();
    const ChannelLayout full = default_layout_64();
    if (k == 0 || k > full.names.size())
      throw ConfigError("synth.n_channels must be in [1, 64]");
    cfg.layout = make_layout(
        std::vector<std::string>(full.names.begin(), full.names.begin() + k));
  }
  cfg.sample_rate_hz = get_or(j, "sample_rate_hz", cfg.sample_rate_hz);
  cfg.epoch_start_ms = get_or(j, "epoch_start_ms", cfg.epoch_start_ms);
  cfg.n_samples = get_or(j, "n_samples", cfg.n_samples);
  cfg.noise_sigma = get_or(j, "noise_sigma", cfg.noise_sigma);
  cfg.background_alpha = get_or(j, "background_alpha", cfg.background_alpha);
  cfg.rng_seed = get_or<std::uint64_t>(j, "rng_seed", cfg.rng_seed);

  if (j.contains("effects")) {
    cfg.effects.clear();
    for (const json& e : j.at("effects")) {
      EffectSpec spec;
      for (const json& g : e.at("groups")) spec.groups_affected.insert(group_from_string(g));
      if (e.contains("condition")) {
        const json& c = e.at("condition");
        if (c.contains("sentiment")) spec.condition.sentiment = parse_sentiment_field(c, "sentiment");
        if (c.contains("last_word_valence"))
          spec.condition.last_word_valence = parse_sentiment_field(c, "last_word_valence");
        if (c.contains("response"))
          spec.condition.response = response_from_string(c.at("response").get<std::string>());
      }
      spec.channels = e.at("channels").get<std::vector<std::string>>();
      const auto w = e.at("window_ms").get<std::vector<double>>();
      if (w.size() != 2) throw ConfigError("effect.window_ms must be [start, end]");
      spec.window_ms = {w[0], w[1]};
      spec.amplitude = e.at("amplitude").get<double>();
      spec.latency_jitter_ms = get_or(e, "latency_jitter_ms", 0.0);
      spec.subject_sigma = get_or(e, "subject_sigma", 0.0);
      cfg.effects.push_back(std::move(spec));
    }
  }
  if (j.contains("behavior")) {
    const json& b = j.at("behavior");
    cfg.behavior.respond_prob = get_or(b, "respond_prob", cfg.behavior.respond_prob);
    if (b.contains("agree_prob")) {
      cfg.behavior.agree_prob.clear();
      for (const auto& [gk, per_sent] : b.at("agree_prob").items()) {
        const Group g = group_from_string(gk);
        for (const auto& [sk, p] : per_sent.items())
          cfg.behavior.agree_prob[{g, sentiment_from_string(sk)}] = p.get<double>();
      }
    }
    if (b.contains("rt_lognormal")) {
      cfg.behavior.rt_lognormal_params.clear();
      for (const auto& [gk, mu_sigma] : b.at("rt_lognormal").items()) {
        const auto ms = mu_sigma.get<std::vector<double>>();
        if (ms.size() != 2) throw ConfigError("behavior.rt_lognormal entries must be [mu, sigma]");
        cfg.behavior.rt_lognormal_params[group_from_string(gk)] = {ms[0], ms[1]};
      }
    }
  }
  return cfg;
}

// ------------------------------------------------------------------- context

struct Ctx {
  json cfg;
  std::string command;
  std::string out_dir;
  std::string dataset_path;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

void write_run_meta(const Ctx& ctx) {
  nlohmann::ordered_json meta;
  meta["tool"] = "eegdec";
  meta["version"] = kToolVersion;
  meta["command"] = ctx.command;
  meta["seed"] = ctx.seed;
  meta["config"] = ctx.cfg;
  write_text_file((fs::path(ctx.out_dir) / "run_meta.json").string(), meta.dump(2) + "\n");
}

void ensure_out_dir(const Ctx& ctx) {
  if (ctx.out_dir.empty()) throw ConfigError("no output directory (set --out or output_dir)");
  fs::create_directories(ctx.out_dir);
}

Dataset load_ds(const Ctx& ctx) {
  if (ctx.dataset_path.empty())
    throw ConfigError("no dataset path (set --data or dataset_path)");
  try {
    if (!fs::exists(ctx.dataset_path))
      throw std::runtime_error("dataset path does not exist: " + ctx.dataset_path);
    return load_dataset(ctx.dataset_path);
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
}

std::string out_path(const Ctx& ctx, const std::string& name) {
  return (fs::path(ctx.out_dir) / name).string();
}

// -------------------------------------------------------------- ERP pipeline

struct ErpCohort {
  std::vector<ErpSeries> erps;
  std::vector<int> labels;
  std::vector<std::string> excluded;
};

std::string grouping_tag(const std::vector<GroupingSpec>& specs) {
  std::string tag;
  for (const GroupingSpec& g : specs) {
    if (!tag.empty()) tag += " - ";
    tag += to_string(g.category) + "/" + to_string(g.side);
    if (!g.single_filter.empty()) tag += "=" + g.single_filter;
  }
  return tag;
}

// Select, preprocess (baseline z-score, optional resample, window-average),
// average to one ERP per subject; two specs produce the a-minus-b contrast.
ErpCohort build_erp_cohort(const Dataset& ds,
                           const std::pair<std::set<Group>, std::set<Group>>& classes,
                           const std::vector<GroupingSpec>& specs, const PrepConfig& prep) {
  ErpCohort cohort;
  const std::string tag = grouping_tag(specs);
  for (const SubjectRecord& sub : ds.subjects) {
    int label;
    if (classes.first.count(sub.group)) label = 0;
    else if (classes.second.count(sub.group)) label = 1;
    else continue;
    try {
      std::vector<ErpSeries> sides;
      for (const GroupingSpec& spec : specs) {
        std::vector<EpochedTrial> prepped;
        for (const EpochedTrial* tr : select_trials(sub, spec)) {
          EpochedTrial t = baseline_zscore(*tr, prep);
          if (prep.target_rate_hz) t = resample(t, *prep.target_rate_hz);
          t = window_average(t, prep.mvpa_window_ms);
          prepped.push_back(std::move(t));
        }
        std::vector<const EpochedTrial*> ptrs;
        for (const EpochedTrial& t : prepped) ptrs.push_back(&t);
        sides.push_back(compute_erp(ptrs, sub.subject_id, tag));
      }
      cohort.erps.push_back(sides.size() == 2 ? contrast(sides[0], sides[1])
                                              : std::move(sides[0]));
      cohort.labels.push_back(label);
    } catch (const EmptySelection&) {
      cohort.excluded.push_back(sub.subject_id);
    }
  }
  if (cohort.erps.size() < 4)
    throw DataError("decoding cohort too small: " + std::to_string(cohort.erps.size()) +
                    " usable subjects");
  return cohort;
}

// ----------------------------------------------------------------- commands

int cmd_synth(const Ctx& ctx, const std::string& preset) {
  SynthConfig cfg;
  try {
    cfg = parse_synth(subsection(ctx.cfg, "synth"), preset, ctx.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synth config: ") + e.what());
  }
  std::size_t total_subjects = 0;
  for (const auto& [grp, n] : cfg.n_subjects_per_group) total_subjects += n;
  if (total_subjects == 0)
    throw ConfigError("synth.n_subjects_per_group is missing or all zero; nothing to generate");
  ensure_out_dir(ctx);
  Dataset ds;
  try {
    ds = generate(cfg, ctx.threads);
    save_dataset(ds, ctx.out_dir);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());  // generator validates its config
  }
  write_run_meta(ctx);
  std::printf("wrote %zu subjects to %s\n", ds.subjects.size(), ctx.out_dir.c_str());
  return 0;
}

int cmd_decode(const Ctx& ctx) {
  const json& dj = subsection(ctx.cfg, "decode");
  const Dataset ds = load_ds(ctx);
  const PrepConfig prep = parse_prep(subsection(ctx.cfg, "prep"));
  const auto classes = parse_classes(subsection(dj, "classes"));
  const auto groupings = parse_groupings(dj, "grouping", ctx.seed);
  // Seeds only matter through init_jitter (or oversampling); decoding defaults
  // it on so the configured seed count buys real variation.
  const FitConfig fit_cfg = parse_fit(subsection(dj, "fit"), 0.01);
  const bool oversample = get_or(dj, "oversample", true);
  const int n_seeds = get_or(dj, "n_seeds", 10);
  if (n_seeds < 1) throw ConfigError("decode.n_seeds must be >= 1");

  const ErpCohort cohort = build_erp_cohort(ds, classes, groupings, prep);
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < n_seeds; ++s)
    seeds.push_back(seed_mix(ctx.seed, static_cast<std::uint64_t>(s)));

  const DecodingTimeSeries dts =
      decode_timecourse(cohort.erps, cohort.labels, seeds, fit_cfg, oversample, ctx.threads);

  const ClusterConfig ccfg = parse_cluster(subsection(dj, "cluster"), ctx.seed);
  const std::string null_kind = get_or<std::string>(subsection(dj, "cluster"), "null", "label_perm");
  ClusterResult cr;
  if (null_kind == "label_perm")
    cr = cluster_test_scores(dts.subject_scores, dts.subject_labels, dts.timepoints_ms, ccfg);
  else if (null_kind == "sign_flip_seeds")
    cr = cluster_test(dts.auc_per_seed, dts.timepoints_ms, ccfg);
  else
    throw ConfigError("decode.cluster.null must be label_perm or sign_flip_seeds");

  std::vector<std::size_t> sig_timepoints;
  for (std::size_t t = 0; t < dts.timepoints_ms.size(); ++t)
    for (std::size_t ci : cr.significant) {
      const Cluster& c = cr.clusters[ci];
      if (dts.timepoints_ms[t] >= c.start_ms && dts.timepoints_ms[t] < c.end_ms) {
        sig_timepoints.push_back(t);
        break;
      }
    }

  ensure_out_dir(ctx);
  write_text_file(out_path(ctx, "decoding.csv"), decoding_csv(dts));
  write_text_file(out_path(ctx, "decoding_mean.csv"), decoding_mean_csv(dts));
  write_text_file(out_path(ctx, "clusters.json"), cluster_json(cr));
  write_text_file(out_path(ctx, "excluded.csv"), excluded_csv(cohort.excluded));
  if (!sig_timepoints.empty()) {
    const ChannelImportanceMap imp = channel_importance(dts, sig_timepoints);
    write_text_file(out_path(ctx, "importance.csv"), importance_csv(ds.layout.names, imp));
  } else {
    write_text_file(out_path(ctx, "importance.csv"), "channel,proportion\n");
  }
  write_run_meta(ctx);
  std::printf("decode: %zu timepoints, %zu significant cluster(s), %zu excluded\n",
              dts.timepoints_ms.size(), cr.significant.size(), cohort.excluded.size());
  return 0;
}

struct TaskSpec {
  std::string name;
  std::pair<std::set<Group>, std::set<Group>> classes;
};

std::vector<TaskSpec> parse_tasks(const json& j) {
  std::vector<TaskSpec> tasks;
  if (!j.contains("tasks")) {
    tasks.push_back({"C_vs_DS", {{Group::C}, {Group::D, Group::S}}});
    tasks.push_back({"D_vs_S", {{Group::D}, {Group::S}}});
    return tasks;
  }
  for (const json& t : j.at("tasks"))
    tasks.push_back({t.at("name").get<std::string>(), parse_classes(t)});
  if (tasks.empty()) throw ConfigError("classify.tasks must not be empty");
  return tasks;
}

struct ConditionSpec {
  std::string condition;
  std::string trial_type;
  std::vector<GroupingSpec> grouping;
};

std::vector<ConditionSpec> table1_grid(std::uint64_t base_seed) {
  auto one = [](Category c, Side s) {
    GroupingSpec g;
    g.category = c;
    g.side = s;
    return g;
  };
  std::vector<ConditionSpec> grid;
  const struct {
    const char* name;
    Category cat;
    const char* type_a;
    const char* type_b;
  } blocks[] = {
      {"Sentence Sentiment", Category::sentence_sentiment, "Positive", "Negative"},
      {"Last Word Valence", Category::last_word_valence, "Positive", "Negative"},
      {"Response Type", Category::response_type, "Agree", "Disagree"},
      {"Response Time", Category::response_time, "Slow", "Fast"},
  };
  for (const auto& b : blocks) {
    grid.push_back({b.name, b.type_a, {one(b.cat, Side::a)}});
    grid.push_back({b.name, b.type_b, {one(b.cat, Side::b)}});
    grid.push_back({b.name, "Contrasting", {one(b.cat, Side::a), one(b.cat, Side::b)}});
  }
  GroupingSpec all;
  all.category = Category::all;
  grid.push_back({"Baseline", "All Sentences", {all}});
  GroupingSpec rs_a = one(Category::random_split, Side::a);
  GroupingSpec rs_b = one(Category::random_split, Side::b);
  rs_a.rng_seed = rs_b.rng_seed = seed_mix(base_seed, 0x5EED);
  grid.push_back({"Baseline", "Random Contrasting", {rs_a, rs_b}});
  return grid;
}

std::vector<ConditionSpec> parse_conditions(const json& j, std::uint64_t base_seed) {
  const std::string grid = get_or<std::string>(j, "grid", j.contains("conditions") ? "custom" : "table1");
  if (grid == "table1") return table1_grid(base_seed);
  if (grid != "custom") throw ConfigError("classify.grid must be 'table1' or 'custom'");
  if (!j.contains("conditions") || !j.at("conditions").is_array() || j.at("conditions").empty())
    throw ConfigError("classify.conditions must be a non-empty array");
  std::vector<ConditionSpec> out;
  for (const json& c : j.at("conditions"))
    out.push_back({get_or<std::string>(c, "condition", "Custom"),
                   get_or<std::string>(c, "trial_type", "Custom"),
                   parse_groupings(c, "grouping", base_seed)});
  return out;
}

// Mean-centered sign-flip test and percentile bootstrap for response-target
// cells, where each subject carries its own AUC rather than a probability.
AucWithCi mean_auc_stats(const std::vector<double>& per_subject_auc, int n_boot, int n_perm,
                         std::uint64_t seed) {
  AucWithCi out;
  const std::size_t n = per_subject_auc.size();
  double mean = 0.0;
  for (double v : per_subject_auc) mean += v;
  mean /= static_cast<double>(n);
  out.auc = mean;
  std::vector<double> boots(static_cast<std::size_t>(n_boot));
  for (int b = 0; b < n_boot; ++b) {
    Rng rng(seed_mix(seed_mix(seed, 1), static_cast<std::uint64_t>(b)));
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += per_subject_auc[rng.uniform_int(n)];
    boots[static_cast<std::size_t>(b)] = m / static_cast<double>(n);
  }
  std::sort(boots.begin(), boots.end());
  auto nearest = [&](double q) {
    auto r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n_boot)));
    r = std::min<std::size_t>(std::max<std::size_t>(r, 1), boots.size());
    return boots[r - 1];
  };
  out.ci_lo = std::min(nearest(0.025), out.auc);
  out.ci_hi = std::max(nearest(0.975), out.auc);
  int ge = 0;
  for (int p = 0; p < n_perm; ++p) {
    Rng rng(seed_mix(seed_mix(seed, 2), static_cast<std::uint64_t>(p)));
    double m = 0.0;
    for (double v : per_subject_auc) m += rng.coin() ? v : 1.0 - v;
    if (m / static_cast<double>(n) >= mean) ++ge;
  }
  out.p_vs_chance = (1.0 + ge) / (1.0 + n_perm);
  out.n_boot = n_boot;
  out.n_perm = n_perm;
  return out;
}

int cmd_classify(const Ctx& ctx) {
  const json& cj = subsection(ctx.cfg, "classify");
  const Dataset ds = load_ds(ctx);
  const PrepConfig prep = parse_prep(subsection(ctx.cfg, "prep"));
  const std::vector<TaskSpec> tasks = parse_tasks(cj);
  const std::vector<ConditionSpec> conditions = parse_conditions(cj, ctx.seed);
  const ClassifierSpec clf = parse_classifier(subsection(cj, "classifier"));
  const json& sj = subsection(cj, "stats");
  const int stats_boot = get_or(sj, "n_boot", 1000);
  const int stats_perm = get_or(sj, "n_perm", 1000);

  std::vector<ClassifyRow> rows;
  nlohmann::ordered_json report_cells = nlohmann::ordered_json::array();
  for (const TaskSpec& task : tasks) {
    for (const ConditionSpec& cond : conditions) {
      const std::string cell_key = task.name + "/" + cond.condition + "/" + cond.trial_type;
      BootstrapConfig bcfg = parse_bootstrap(subsection(cj, "bootstrap"), ctx.seed);
      bcfg.rng_seed = seed_mix(ctx.seed, hash_str(cell_key));
      const SubjectClfResult res = run_subject_classification(
          ds, cond.grouping, task.classes, clf, bcfg, prep, ctx.threads);

      std::vector<double> ps(res.probs.size());
      for (std::size_t i = 0; i < ps.size(); ++i) ps[i] = res.probs[i].p_positive_class;
      const std::uint64_t stats_seed = seed_mix(seed_mix(ctx.seed, 0x57A7), hash_str(cell_key));
      const AucWithCi cell_stats =
          bcfg.target_label == TargetLabel::response
              ? mean_auc_stats(ps, stats_boot, stats_perm, stats_seed)
              : auc_with_ci(ps, res.labels, stats_boot, stats_perm, stats_seed);

      rows.push_back({cond.condition, cond.trial_type, task.name, cell_stats});
      nlohmann::ordered_json cell;
      cell["task"] = task.name;
      cell["condition"] = cond.condition;
      cell["trial_type"] = cond.trial_type;
      cell["positive_class"] = res.positive_class;
      cell["auc"] = cell_stats.auc;
      cell["ci_lo"] = cell_stats.ci_lo;
      cell["ci_hi"] = cell_stats.ci_hi;
      cell["p_vs_chance"] = cell_stats.p_vs_chance;
      cell["n_folds"] = res.n_folds;
      cell["excluded"] = res.excluded;
      cell["subjects"] = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < res.probs.size(); ++i)
        cell["subjects"].push_back({{"subject_id", res.probs[i].subject_id},
                                    {"p", res.probs[i].p_positive_class},
                                    {"n_boot", res.probs[i].n_boot_used},
                                    {"label", res.labels[i]}});
      report_cells.push_back(std::move(cell));
    }
  }

  ensure_out_dir(ctx);
  write_text_file(out_path(ctx, "classify.csv"), classify_csv(rows));
  nlohmann::ordered_json report;
  report["cells"] = std::move(report_cells);
  write_text_file(out_path(ctx, "classify.json"), report.dump(2) + "\n");
  write_run_meta(ctx);
  std::printf("classify: %zu rows (%zu tasks x %zu conditions)\n", rows.size(), tasks.size(),
              conditions.size());
  return 0;
}

int cmd_transfer(const Ctx& ctx) {
  const json& tj = subsection(ctx.cfg, "transfer");
  const Dataset ds = load_ds(ctx);
  const PrepConfig prep = parse_prep(subsection(ctx.cfg, "prep"));
  const auto classes = parse_classes(subsection(tj, "train"));
  const auto groupings = parse_groupings(tj, "grouping", ctx.seed);
  const ClassifierSpec clf = parse_classifier(subsection(tj, "classifier"));
  BootstrapConfig bcfg = parse_bootstrap(subsection(tj, "bootstrap"), ctx.seed);

  const TransferResult res =
      transfer_eval(ds, groupings, classes, clf, bcfg, prep, ctx.threads);

  ensure_out_dir(ctx);
  write_text_file(out_path(ctx, "transfer.csv"), transfer_csv(res));
  nlohmann::ordered_json j;
  j["positive_class"] = res.positive_class;
  j["groups"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < res.group_order.size(); ++i)
    j["groups"].push_back({{"group", to_string(res.group_order[i])},
                           {"mean_p", res.mean_p[i]},
                           {"p", res.per_group_p[i]}});
  write_text_file(out_path(ctx, "transfer.json"), j.dump(2) + "\n");
  write_run_meta(ctx);
  std::printf("transfer: %zu groups, %zu pairwise tests\n", res.group_order.size(),
              res.tests.size());
  return 0;
}

int cmd_ablate(const Ctx& ctx) {
  const json& aj = subsection(ctx.cfg, "ablate");
  const std::string mode = get_or<std::string>(aj, "mode", "grid");
  const Dataset ds = load_ds(ctx);
  const PrepConfig prep = parse_prep(subsection(ctx.cfg, "prep"));
  ensure_out_dir(ctx);

  if (mode == "grid") {
    const auto classes = parse_classes(subsection(aj, "classes"));
    const auto groupings = parse_groupings(aj, "grouping", ctx.seed);
    const FitConfig fit_cfg = parse_fit(subsection(aj, "fit"), 0.01);
    const int n_seeds = get_or(aj, "n_seeds", 10);
    if (!aj.contains("time_ends_ms")) throw ConfigError("ablate.time_ends_ms required");
    const auto time_ends = aj.at("time_ends_ms").get<std::vector<double>>();

    std::vector<ChannelSet> sets;
    if (!aj.contains("channel_sets")) throw ConfigError("ablate.channel_sets required");
    for (const json& s : aj.at("channel_sets")) {
      ChannelSet cs;
      cs.label = s.at("label").get<std::string>();
      if (s.contains("region")) {
        cs.channels = ds.layout.indices_for_region(
            region_from_string(s.at("region").get<std::string>()));
      } else if (s.contains("channels")) {
        cs.channels =
            ds.layout.indices_for_names(s.at("channels").get<std::vector<std::string>>());
      } else {
        cs.channels.resize(ds.layout.size());
        for (std::size_t i = 0; i < cs.channels.size(); ++i) cs.channels[i] = i;
      }
      sets.push_back(std::move(cs));
    }

    const ErpCohort cohort = build_erp_cohort(ds, classes, groupings, prep);
    std::vector<std::uint64_t> seeds;
    for (int s = 0; s < n_seeds; ++s)
      seeds.push_back(seed_mix(ctx.seed, static_cast<std::uint64_t>(s)));
    const AblationTable table = ablation_grid(cohort.erps, cohort.labels, time_ends, sets,
                                              seeds, fit_cfg, get_or(aj, "oversample", true),
                                              ctx.threads);
    std::string csv = "channel_set";
    for (double e : table.time_ends_ms) csv += ",end_" + fmt_double(e);
    csv += '\n';
    for (std::size_t r = 0; r < table.channel_set_labels.size(); ++r) {
      csv += csv_field(table.channel_set_labels[r]);
      for (std::size_t c = 0; c < table.time_ends_ms.size(); ++c)
        csv += "," + fmt_double(table.mean_auc.at(r, c));
      csv += '\n';
    }
    write_text_file(out_path(ctx, "ablation_grid.csv"), csv);
    write_run_meta(ctx);
    std::printf("ablate grid: %zu channel sets x %zu time ends\n",
                table.channel_set_labels.size(), table.time_ends_ms.size());
    return 0;
  }

  if (mode == "budget") {
    const auto classes = parse_classes(subsection(aj, "classes"));
    const auto groupings = parse_groupings(aj, "grouping", ctx.seed);
    const ClassifierSpec clf = parse_classifier(subsection(aj, "classifier"));
    BootstrapConfig bcfg = parse_bootstrap(subsection(aj, "bootstrap"), ctx.seed);
    const BudgetAxis axis =
        budget_axis_from_string(get_or<std::string>(aj, "axis", "trials_train_test"));
    if (!aj.contains("fractions")) throw ConfigError("ablate.fractions required");
    const auto fractions = aj.at("fractions").get<std::vector<double>>();
    const BudgetTable table = budget_ablation(ds, groupings, classes, clf, bcfg, prep, axis,
                                              fractions, ctx.threads);
    write_text_file(out_path(ctx, "budget.csv"), budget_csv(table));
    write_run_meta(ctx);
    std::printf("ablate budget: %zu fractions along %s\n", fractions.size(),
                to_string(axis).c_str());
    return 0;
  }

  if (mode == "nb") {
    const auto classes = parse_classes(subsection(aj, "classes"));
    const ClassifierSpec clf = parse_classifier(subsection(aj, "classifier"));
    const BootstrapConfig base_cfg = parse_bootstrap(subsection(aj, "bootstrap"), ctx.seed);
    const json& sj = subsection(aj, "stats");
    const int stats_boot = get_or(sj, "n_boot", 1000);
    const int stats_perm = get_or(sj, "n_perm", 1000);
    const auto n_list = get_or(aj, "n_list", std::vector<int>{100, 200, 400, 1000});
    const auto b_list = get_or(aj, "b_list", std::vector<int>{5, 10, 20, 40});

    std::vector<std::pair<std::string, std::vector<GroupingSpec>>> conds;
    if (aj.contains("conditions")) {
      for (const json& c : aj.at("conditions"))
        conds.push_back({c.at("name").get<std::string>(),
                         parse_groupings(c, "grouping", ctx.seed)});
    } else {
      auto pair_of = [](Category cat) {
        GroupingSpec a, b;
        a.category = b.category = cat;
        a.side = Side::a;
        b.side = Side::b;
        return std::vector<GroupingSpec>{a, b};
      };
      conds.push_back({"sentence_sentiment", pair_of(Category::sentence_sentiment)});
      conds.push_back({"response_type", pair_of(Category::response_type)});
    }

    auto run_cell = [&](const BootstrapConfig& bcfg,
                        const std::vector<GroupingSpec>& grouping,
                        const std::string& key) {
      const SubjectClfResult res = run_subject_classification(
          ds, grouping, classes, clf, bcfg, prep, ctx.threads);
      std::vector<double> ps(res.probs.size());
      for (std::size_t i = 0; i < ps.size(); ++i) ps[i] = res.probs[i].p_positive_class;
      return auc_with_ci(ps, res.labels, stats_boot, stats_perm,
                         seed_mix(seed_mix(ctx.seed, 0x57A7), hash_str(key)));
    };

    NbTable n_table, b_table;
    n_table.param_name = "N";
    n_table.param_values = n_list;
    b_table.param_name = "B";
    b_table.param_values = b_list;
    for (const auto& [name, _] : conds) {
      n_table.conditions.push_back(name);
      b_table.conditions.push_back(name);
    }
    for (int nv : n_list) {
      std::vector<AucWithCi> row;
      for (const auto& [name, grouping] : conds) {
        BootstrapConfig bcfg = base_cfg;
        bcfg.n_boot = nv;
        bcfg.rng_seed = seed_mix(ctx.seed, hash_str("N=" + std::to_string(nv) + "/" + name));
        row.push_back(run_cell(bcfg, grouping, "N" + std::to_string(nv) + name));
      }
      n_table.cells.push_back(std::move(row));
    }
    for (int bv : b_list) {
      std::vector<AucWithCi> row;
      for (const auto& [name, grouping] : conds) {
        BootstrapConfig bcfg = base_cfg;
        bcfg.trials_per_boot = bv;
        bcfg.rng_seed = seed_mix(ctx.seed, hash_str("B=" + std::to_string(bv) + "/" + name));
        row.push_back(run_cell(bcfg, grouping, "B" + std::to_string(bv) + name));
      }
      b_table.cells.push_back(std::move(row));
    }
    write_text_file(out_path(ctx, "nb_n.csv"), nb_table_csv(n_table));
    write_text_file(out_path(ctx, "nb_b.csv"), nb_table_csv(b_table));
    write_run_meta(ctx);
    std::printf("ablate nb: %zu N values, %zu B values, %zu conditions\n", n_list.size(),
                b_list.size(), conds.size());
    return 0;
  }

  throw ConfigError("ablate.mode must be grid, budget, or nb");
}

int cmd_behavioral(const Ctx& ctx) {
  const json& bj = subsection(ctx.cfg, "behavioral");
  const Dataset ds = load_ds(ctx);
  const auto classes = parse_classes(subsection(bj, "classes"));
  const double lambda = get_or(bj, "lambda", 0.1);
  const BehavioralBaselineResult res = behavioral_baseline(ds, classes, lambda, ctx.seed);

  ensure_out_dir(ctx);
  std::string csv = "subject_id,p,label\n";
  for (std::size_t i = 0; i < res.probs.size(); ++i) {
    csv += csv_field(res.probs[i].subject_id);
    csv += ',' + fmt_double(res.probs[i].p_positive_class);
    csv += ',' + std::to_string(res.labels[i]);
    csv += '\n';
  }
  write_text_file(out_path(ctx, "behavioral.csv"), csv);
  nlohmann::ordered_json j;
  j["auc"] = res.auc;
  j["feature_names"] = {"agree_positive", "disagree_positive", "agree_negative",
                        "disagree_negative"};
  j["weights"] = res.model.weights;
  j["intercept"] = res.model.intercept;
  write_text_file(out_path(ctx, "behavioral.json"), j.dump(2) + "\n");
  write_run_meta(ctx);
  std::printf("behavioral baseline: AUC %s over %zu subjects\n", fmt_double(res.auc).c_str(),
              res.probs.size());
  return 0;
}

int cmd_correlate(const Ctx& ctx) {
  const json& rj = subsection(ctx.cfg, "correlate");
  const Dataset ds = load_ds(ctx);
  const std::string report_path = get_or<std::string>(rj, "classify_report", "");
  if (report_path.empty()) throw ConfigError("correlate.classify_report required");
  if (!fs::exists(report_path))
    throw ConfigError("classify report not found: " + report_path);
  json report;
  try {
    std::ifstream f(report_path);
    report = json::parse(f);
  } catch (const json::exception& e) {
    throw DataError("classify report parse error: " + std::string(e.what()));
  }

  const json& sel = subsection(rj, "select");
  const std::string want_task = get_or<std::string>(sel, "task", "C_vs_DS");
  const std::string want_cond = get_or<std::string>(sel, "condition", "Sentence Sentiment");
  const std::string want_type = get_or<std::string>(sel, "trial_type", "Contrasting");
  const json* cell = nullptr;
  for (const json& c : report.at("cells"))
    if (c.at("task") == want_task && c.at("condition") == want_cond &&
        c.at("trial_type") == want_type) {
      cell = &c;
      break;
    }
  if (!cell)
    throw ConfigError("no classify cell matches " + want_task + "/" + want_cond + "/" +
                      want_type);

  std::map<std::string, const SubjectRecord*> by_id;
  for (const SubjectRecord& sub : ds.subjects) by_id[sub.subject_id] = &sub;

  struct Entry {
    const SubjectRecord* sub;
    double p;
  };
  std::vector<Entry> entries;
  for (const json& s : cell->at("subjects")) {
    const auto it = by_id.find(s.at("subject_id").get<std::string>());
    if (it == by_id.end())
      throw DataError("classify report subject missing from dataset: " +
                      s.at("subject_id").get<std::string>());
    entries.push_back({it->second, s.at("p").get<double>()});
  }

  const auto questionnaires = get_or(rj, "questionnaires",
                                     std::vector<std::string>{"phq9_screen", "phq9_dayof",
                                                              "gad7", "sis"});
  const int n_perm = get_or(rj, "n_perm", 1000);

  std::vector<CorrelationRow> rows;
  for (Group g : {Group::C, Group::D, Group::S}) {
    std::vector<const Entry*> members;
    for (const Entry& e : entries)
      if (e.sub->group == g) members.push_back(&e);
    for (const std::string& q : questionnaires) {
      CorrelationRow row;
      row.group = to_string(g);
      row.questionnaire = q;
      std::vector<double> p, score;
      for (const Entry* e : members) {
        const auto it = e->sub->questionnaires.find(q);
        if (it == e->sub->questionnaires.end()) continue;
        p.push_back(e->p);
        score.push_back(static_cast<double>(it->second));
      }
      row.n = p.size();
      if (members.empty()) {
        row.skipped = true;
        row.note = "no subjects in group";
      } else if (p.size() < 3) {
        row.skipped = true;
        row.note = "fewer than 3 subjects with scores";
      } else {
        try {
          row.rho = spearman(p, score);
          row.p_value = spearman_perm_p(
              p, score, n_perm,
              seed_mix(seed_mix(ctx.seed, hash_str(q)), static_cast<std::uint64_t>(g)));
        } catch (const std::runtime_error& e) {
          row.skipped = true;
          row.note = e.what();
        }
      }
      rows.push_back(std::move(row));
    }
  }

  // Same-sample comparison between two questionnaires (default: the two PHQ-9
  // administrations), pooled over all subjects holding both scores.
  nlohmann::ordered_json cmp = nlohmann::ordered_json::object();
  const auto compare = get_or(rj, "compare",
                              std::vector<std::string>{"phq9_dayof", "phq9_screen"});
  if (compare.size() == 2) {
    std::vector<double> p, q1, q2;
    for (const Entry& e : entries) {
      const auto i1 = e.sub->questionnaires.find(compare[0]);
      const auto i2 = e.sub->questionnaires.find(compare[1]);
      if (i1 == e.sub->questionnaires.end() || i2 == e.sub->questionnaires.end()) continue;
      p.push_back(e.p);
      q1.push_back(static_cast<double>(i1->second));
      q2.push_back(static_cast<double>(i2->second));
    }
    cmp["questionnaire_a"] = compare[0];
    cmp["questionnaire_b"] = compare[1];
    cmp["n"] = p.size();
    if (p.size() >= 3) {
      try {
        cmp["rho_a"] = spearman(p, q1);
        cmp["rho_b"] = spearman(p, q2);
        cmp["p_difference"] =
            perm_compare_correlations(p, q1, q2, n_perm, seed_mix(ctx.seed, 0xC02E));
      } catch (const std::runtime_error& e) {
        cmp["skipped"] = e.what();
      }
    } else {
      cmp["skipped"] = "fewer than 3 subjects with both scores";
    }
  }

  ensure_out_dir(ctx);
  write_text_file(out_path(ctx, "correlations.csv"), correlations_csv(rows));
  nlohmann::ordered_json j;
  j["cell"] = {{"task", want_task}, {"condition", want_cond}, {"trial_type", want_type}};
  j["comparison"] = std::move(cmp);
  write_text_file(out_path(ctx, "correlate.json"), j.dump(2) + "\n");
  write_run_meta(ctx);
  std::printf("correlate: %zu rows over %zu subjects\n", rows.size(), entries.size());
  return 0;
}

int cmd_validate(const Ctx& ctx) {
  const Dataset ds = load_ds(ctx);  // throws DataError on any violation
  std::size_t n_trials = 0;
  for (const SubjectRecord& sub : ds.subjects) n_trials += sub.trials.size();
  std::printf("ok: %zu subjects, %zu trials, %zu channels\n", ds.subjects.size(), n_trials,
              ds.layout.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG group decoding and subject classification experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, data_path, preset;
  std::uint64_t seed_flag = 0;
  unsigned threads = 0;
  std::vector<std::string> sets;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed_flag, "base RNG seed (overrides config base_seed)");
  app.add_option("--threads", threads, "worker cap (0 = hardware)");
  app.add_option("--out", out_dir, "output directory (overrides config output_dir)");
  app.add_option("--data", data_path, "dataset directory (overrides config dataset_path)");
  app.add_option("--set", sets, "config override key=value (dotted keys)");

  CLI::App* sc_synth = app.add_subcommand("synth", "generate a synthetic dataset");
  sc_synth->add_option("--preset", preset, "named preset (paper)");
  CLI::App* sc_decode = app.add_subcommand("decode", "time-resolved group decoding");
  CLI::App* sc_classify = app.add_subcommand("classify", "bootstrapped subject classification");
  CLI::App* sc_transfer = app.add_subcommand("transfer", "held-out group transfer");
  CLI::App* sc_ablate = app.add_subcommand("ablate", "time/channel, budget, or N/B ablations");
  CLI::App* sc_behavioral = app.add_subcommand("behavioral", "behavioral-features baseline");
  CLI::App* sc_correlate = app.add_subcommand("correlate", "probabilities vs questionnaires");
  CLI::App* sc_validate = app.add_subcommand("validate", "check a dataset against the schema");
  for (CLI::App* sc : {sc_synth, sc_decode, sc_classify, sc_transfer, sc_ablate,
                       sc_behavioral, sc_correlate, sc_validate})
    sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Ctx ctx;
    ctx.cfg = load_config_file(config_path);
    apply_set_overrides(ctx.cfg, sets);
    ctx.seed = app.count("--seed") ? seed_flag : get_or<std::uint64_t>(ctx.cfg, "base_seed", 0);
    ctx.threads = threads;
    ctx.out_dir = !out_dir.empty() ? out_dir : get_or<std::string>(ctx.cfg, "output_dir", "out");
    ctx.dataset_path =
        !data_path.empty() ? data_path : get_or<std::string>(ctx.cfg, "dataset_path", "");
    // Echo the effective values so a rerun of this meta is exact.
    ctx.cfg["base_seed"] = ctx.seed;
    ctx.cfg["output_dir"] = ctx.out_dir;
    if (!ctx.dataset_path.empty()) ctx.cfg["dataset_path"] = ctx.dataset_path;

    if (sc_synth->parsed()) {
      ctx.command = "synth";
      if (!preset.empty()) ctx.cfg["synth"]["preset"] = preset;
      return cmd_synth(ctx, preset);
    }
    if (sc_decode->parsed()) { ctx.command = "decode"; return cmd_decode(ctx); }
    if (sc_classify->parsed()) { ctx.command = "classify"; return cmd_classify(ctx); }
    if (sc_transfer->parsed()) { ctx.command = "transfer"; return cmd_transfer(ctx); }
    if (sc_ablate->parsed()) { ctx.command = "ablate"; return cmd_ablate(ctx); }
    if (sc_behavioral->parsed()) { ctx.command = "behavioral"; return cmd_behavioral(ctx); }
    if (sc_correlate->parsed()) { ctx.command = "correlate"; return cmd_correlate(ctx); }
    if (sc_validate->parsed()) { ctx.command = "validate"; return cmd_validate(ctx); }
    std::fprintf(stderr, "error: no subcommand\n");
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 4;
  }
}
