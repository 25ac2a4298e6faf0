#include "eegdec/subject_clf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "eegdec/parallel.hpp"

namespace eegdec {

std::string to_string(CvScheme s) {
  return s == CvScheme::five_fold_stratified_gender ? "five_fold_stratified_gender" : "loso";
}
CvScheme cv_scheme_from_string(const std::string& s) {
  if (s == "five_fold_stratified_gender") return CvScheme::five_fold_stratified_gender;
  if (s == "loso") return CvScheme::loso;
  throw std::runtime_error("unknown cv scheme token: '" + s + "'");
}
std::string to_string(TargetLabel t) { return t == TargetLabel::group ? "group" : "response"; }
TargetLabel target_label_from_string(const std::string& s) {
  if (s == "group") return TargetLabel::group;
  if (s == "response") return TargetLabel::response;
  throw std::runtime_error("unknown target_label token: '" + s + "'");
}
std::string to_string(ClassifierKind k) {
  return k == ClassifierKind::sparse_logreg ? "sparse_logreg" : "mlp_1hidden";
}
ClassifierKind classifier_kind_from_string(const std::string& s) {
  if (s == "sparse_logreg") return ClassifierKind::sparse_logreg;
  if (s == "mlp_1hidden") return ClassifierKind::mlp_1hidden;
  throw std::runtime_error("unknown classifier kind token: '" + s + "'");
}
std::string to_string(BudgetAxis a) {
  switch (a) {
    case BudgetAxis::trials_train_test: return "trials_train_test";
    case BudgetAxis::trials_test_only: return "trials_test_only";
    case BudgetAxis::depressed_subjects: return "depressed_subjects";
  }
  return "?";
}
BudgetAxis budget_axis_from_string(const std::string& s) {
  if (s == "trials_train_test") return BudgetAxis::trials_train_test;
  if (s == "trials_test_only") return BudgetAxis::trials_test_only;
  if (s == "depressed_subjects") return BudgetAxis::depressed_subjects;
  throw std::runtime_error("unknown budget axis token: '" + s + "'");
}

namespace {

double hyper(const ClassifierSpec& spec, const std::string& key, double fallback) {
  const auto it = spec.hyperparams.find(key);
  return it != spec.hyperparams.end() ? it->second : fallback;
}

class LogRegClassifier : public TrainedClassifier {
 public:
  LogRegClassifier(LogRegModel model) : model_(std::move(model)) {}
  std::vector<double> predict_proba(const Matrix& X) const override {
    return eegdec::predict_proba(model_, X);
  }

 private:
  LogRegModel model_;
};

// Single hidden layer perceptron: tanh hidden units, sigmoid output, binary
// cross-entropy loss, full-batch gradient descent with a fixed step. Kept
// deliberately plain; it exists as the nonlinear reference classifier.
class MlpClassifier : public TrainedClassifier {
 public:
  MlpClassifier(const Matrix& X, const std::vector<int>& y, std::size_t hidden,
                double lr, int epochs, double init_scale, std::uint64_t seed)
      : d_(X.cols), h_(hidden) {
    Rng rng(seed);
    w1_.resize(h_ * d_);
    b1_.assign(h_, 0.0);
    w2_.resize(h_);
    b2_ = 0.0;
    for (double& v : w1_) v = init_scale * (2.0 * rng.uniform() - 1.0);
    for (double& v : w2_) v = init_scale * (2.0 * rng.uniform() - 1.0);

    const std::size_t n = X.rows;
    std::vector<double> hid(h_), grad_w1(h_ * d_), grad_b1(h_), grad_w2(h_);
    for (int epoch = 0; epoch < epochs; ++epoch) {
      std::fill(grad_w1.begin(), grad_w1.end(), 0.0);
      std::fill(grad_b1.begin(), grad_b1.end(), 0.0);
      std::fill(grad_w2.begin(), grad_w2.end(), 0.0);
      double grad_b2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double* xi = X.row(i);
        for (std::size_t j = 0; j < h_; ++j) {
          double z = b1_[j];
          const double* wj = w1_.data() + j * d_;
          for (std::size_t k = 0; k < d_; ++k) z += wj[k] * xi[k];
          hid[j] = std::tanh(z);
        }
        double zo = b2_;
        for (std::size_t j = 0; j < h_; ++j) zo += w2_[j] * hid[j];
        const double p = sigmoid(zo);
        const double delta = p - static_cast<double>(y[i]);  // dL/dzo for BCE
        grad_b2 += delta;
        for (std::size_t j = 0; j < h_; ++j) {
          grad_w2[j] += delta * hid[j];
          const double dh = delta * w2_[j] * (1.0 - hid[j] * hid[j]);
          grad_b1[j] += dh;
          double* gj = grad_w1.data() + j * d_;
          for (std::size_t k = 0; k < d_; ++k) gj[k] += dh * xi[k];
        }
      }
      const double scale = lr / static_cast<double>(n);
      for (std::size_t j = 0; j < w1_.size(); ++j) w1_[j] -= scale * grad_w1[j];
      for (std::size_t j = 0; j < h_; ++j) {
        b1_[j] -= scale * grad_b1[j];
        w2_[j] -= scale * grad_w2[j];
      }
      b2_ -= scale * grad_b2;
    }
  }

  std::vector<double> predict_proba(const Matrix& X) const override {
    std::vector<double> out(X.rows);
    std::vector<double> hid(h_);
    for (std::size_t i = 0; i < X.rows; ++i) {
      const double* xi = X.row(i);
      for (std::size_t j = 0; j < h_; ++j) {
        double z = b1_[j];
        const double* wj = w1_.data() + j * d_;
        for (std::size_t k = 0; k < d_; ++k) z += wj[k] * xi[k];
        hid[j] = std::tanh(z);
      }
      double zo = b2_;
      for (std::size_t j = 0; j < h_; ++j) zo += w2_[j] * hid[j];
      out[i] = sigmoid(zo);
    }
    return out;
  }

 private:
  std::size_t d_, h_;
  std::vector<double> w1_, b1_, w2_;
  double b2_ = 0.0;
};

}  // namespace

std::unique_ptr<TrainedClassifier> train_classifier(const ClassifierSpec& spec,
                                                    const Matrix& X,
                                                    const std::vector<int>& y,
                                                    std::uint64_t seed, bool oversample) {
  const Matrix* Xp = &X;
  const std::vector<int>* yp = &y;
  Matrix X_os;
  std::vector<int> y_os;
  if (oversample) {
    Rng rng(seed_mix(seed, 0xA5));
    const std::vector<std::size_t> rows = oversample_indices(y, rng);
    if (rows.size() != X.rows) {
      X_os = Matrix(rows.size(), X.cols);
      y_os.resize(rows.size());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        std::copy(X.row(rows[k]), X.row(rows[k]) + X.cols, X_os.row(k));
        y_os[k] = y[rows[k]];
      }
      Xp = &X_os;
      yp = &y_os;
    }
  }

  switch (spec.kind) {
    case ClassifierKind::sparse_logreg: {
      FitConfig cfg;
      cfg.lambda = hyper(spec, "lambda", 0.1);
      cfg.max_iter = static_cast<int>(hyper(spec, "max_iter", 500));
      cfg.tol = hyper(spec, "tol", 1e-6);
      cfg.standardize = hyper(spec, "standardize", 1.0) != 0.0;
      cfg.init_jitter = hyper(spec, "init_jitter", 0.0);
      cfg.rng_seed = seed;
      return std::make_unique<LogRegClassifier>(fit(*Xp, *yp, cfg));
    }
    case ClassifierKind::mlp_1hidden: {
      const auto hidden = static_cast<std::size_t>(hyper(spec, "hidden", 16));
      return std::make_unique<MlpClassifier>(*Xp, *yp, hidden, hyper(spec, "lr", 0.05),
                                             static_cast<int>(hyper(spec, "epochs", 200)),
                                             hyper(spec, "init_scale", 0.1), seed);
    }
  }
  throw std::runtime_error("train_classifier: unsupported classifier kind");
}

std::vector<std::vector<double>> bootstrap_trials(
    const std::vector<const EpochedTrial*>& trials, const BootstrapConfig& cfg,
    const std::string& subject_id) {
  if (trials.empty()) throw std::runtime_error("bootstrap_trials: empty trial list");
  if (cfg.n_boot < 1 || cfg.trials_per_boot < 1)
    throw std::runtime_error("bootstrap_trials: n_boot and trials_per_boot must be >= 1");
  const std::size_t d = trials.front()->data.size();
  Rng rng(seed_mix(cfg.rng_seed, hash_str(subject_id)));
  std::vector<std::vector<double>> out(static_cast<std::size_t>(cfg.n_boot));
  const double inv_b = 1.0 / static_cast<double>(cfg.trials_per_boot);
  for (auto& boot : out) {
    boot.assign(d, 0.0);
    for (int b = 0; b < cfg.trials_per_boot; ++b) {
      const EpochedTrial* tr = trials[rng.uniform_int(trials.size())];
      for (std::size_t i = 0; i < d; ++i) boot[i] += tr->data[i];
    }
    for (double& v : boot) v *= inv_b;
  }
  return out;
}

std::vector<int> stratified_folds(const std::vector<Gender>& genders,
                                  const std::vector<int>& labels, int n_folds,
                                  std::uint64_t seed) {
  if (genders.size() != labels.size())
    throw std::runtime_error("stratified_folds: size mismatch");
  if (n_folds < 2) throw std::runtime_error("stratified_folds: need n_folds >= 2");
  std::vector<int> fold(genders.size(), -1);
  std::size_t deal = 0;
  int gi = 0;
  for (Gender g : {Gender::male, Gender::female, Gender::other}) {
    // Class-contiguous order within the gender, shuffled inside each class:
    // round-robin dealing then spreads both the gender and its classes evenly.
    std::vector<std::size_t> members[2];
    for (std::size_t i = 0; i < genders.size(); ++i)
      if (genders[i] == g) members[labels[i] == 1 ? 1 : 0].push_back(i);
    for (int cls = 0; cls < 2; ++cls) {
      Rng rng(seed_mix(seed, static_cast<std::uint64_t>(gi * 2 + cls)));
      rng.shuffle(members[cls]);
      for (std::size_t idx : members[cls]) {
        fold[idx] = static_cast<int>(deal % static_cast<std::size_t>(n_folds));
        ++deal;
      }
    }
    ++gi;
  }
  return fold;
}

namespace {

// One cohort member with its bootstrap features materialized.
struct BootSubject {
  std::string id;
  Group group = Group::C;
  Gender gender = Gender::other;
  int label = 0;
  Matrix boots;                 // [rows x d]
  std::vector<int> boot_labels;  // per-row labels (response mode); else empty
};

std::vector<const EpochedTrial*> as_ptrs(const std::vector<EpochedTrial>& v) {
  std::vector<const EpochedTrial*> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = &v[i];
  return out;
}

// Baseline z-score plus optional block-mean resampling.
EpochedTrial prep_trial(const EpochedTrial& tr, const PrepConfig& prep,
                        const std::optional<double>& rate) {
  EpochedTrial out = baseline_zscore(tr, prep);
  if (rate) out = resample(out, *rate);
  return out;
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), m.row(i));
  return m;
}

// Side-a minus side-b bootstrap pairs, one stream per subject shared with the
// single-sided builder's convention.
Matrix bootstrap_pairs(const std::vector<const EpochedTrial*>& a,
                       const std::vector<const EpochedTrial*>& b,
                       const BootstrapConfig& cfg, const std::string& subject_id) {
  const std::size_t d = a.front()->data.size();
  Rng rng(seed_mix(cfg.rng_seed, hash_str(subject_id)));
  Matrix out(static_cast<std::size_t>(cfg.n_boot), d);
  const double inv_b = 1.0 / static_cast<double>(cfg.trials_per_boot);
  std::vector<double> mean_a(d), mean_b(d);
  for (int i = 0; i < cfg.n_boot; ++i) {
    std::fill(mean_a.begin(), mean_a.end(), 0.0);
    std::fill(mean_b.begin(), mean_b.end(), 0.0);
    for (int k = 0; k < cfg.trials_per_boot; ++k) {
      const EpochedTrial* tr = a[rng.uniform_int(a.size())];
      for (std::size_t j = 0; j < d; ++j) mean_a[j] += tr->data[j];
    }
    for (int k = 0; k < cfg.trials_per_boot; ++k) {
      const EpochedTrial* tr = b[rng.uniform_int(b.size())];
      for (std::size_t j = 0; j < d; ++j) mean_b[j] += tr->data[j];
    }
    double* dst = out.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < d; ++j) dst[j] = (mean_a[j] - mean_b[j]) * inv_b;
  }
  return out;
}

struct Cohort {
  std::vector<BootSubject> subjects;
  std::vector<std::string> excluded;
  bool response_mode = false;
};

// Optional per-subject trial subsetting hook used by the budget ablation.
using TrialSubset =
    std::function<std::vector<EpochedTrial>(const SubjectRecord&)>;

std::vector<EpochedTrial> all_trials(const SubjectRecord& sub) { return sub.trials; }

Cohort build_cohort(const Dataset& ds, const std::vector<GroupingSpec>& grouping,
                    const std::pair<std::set<Group>, std::set<Group>>& classes,
                    const BootstrapConfig& cfg, const PrepConfig& prep,
                    const TrialSubset& subset, unsigned threads) {
  if (classes.first.empty() || classes.second.empty())
    throw std::runtime_error("subject classification: empty class set");
  for (Group g : classes.first)
    if (classes.second.count(g))
      throw std::runtime_error("subject classification: class sets overlap on group " +
                               to_string(g));
  if (grouping.size() > 2)
    throw std::runtime_error("subject classification: at most two grouping specs");

  Cohort cohort;
  cohort.response_mode = cfg.target_label == TargetLabel::response;

  struct Pending {
    const SubjectRecord* sub;
    int label;
  };
  std::vector<Pending> pending;
  for (const SubjectRecord& sub : ds.subjects) {
    int label;
    if (classes.first.count(sub.group)) label = 0;
    else if (classes.second.count(sub.group)) label = 1;
    else continue;
    pending.push_back({&sub, label});
  }

  std::vector<std::unique_ptr<BootSubject>> built(pending.size());
  std::vector<std::string> failures(pending.size());
  parallel_for(pending.size(), [&](std::size_t pi) {
    const SubjectRecord& orig = *pending[pi].sub;
    SubjectRecord sub;  // shallow working copy holding the (possibly) reduced trials
    sub.subject_id = orig.subject_id;
    sub.group = orig.group;
    sub.gender = orig.gender;
    sub.trials = subset(orig);
    try {
      auto out = std::make_unique<BootSubject>();
      out->id = sub.subject_id;
      out->group = sub.group;
      out->gender = sub.gender;
      out->label = pending[pi].label;

      if (cohort.response_mode) {
        GroupingSpec agree_spec;
        agree_spec.category = Category::response_type;
        agree_spec.side = Side::a;
        GroupingSpec disagree_spec = agree_spec;
        disagree_spec.side = Side::b;
        std::vector<EpochedTrial> agree, disagree;
        for (const EpochedTrial* tr : select_trials(sub, agree_spec))
          agree.push_back(prep_trial(*tr, prep, cfg.resample_rate_hz));
        for (const EpochedTrial* tr : select_trials(sub, disagree_spec))
          disagree.push_back(prep_trial(*tr, prep, cfg.resample_rate_hz));
        // Rows: N agree bootstraps (label 1) then N disagree (label 0), drawn
        // from one subject stream.
        Rng rng(seed_mix(cfg.rng_seed, hash_str(sub.subject_id)));
        const std::size_t d = agree.front().data.size();
        const auto N = static_cast<std::size_t>(cfg.n_boot);
        out->boots = Matrix(2 * N, d);
        out->boot_labels.assign(2 * N, 0);
        const double inv_b = 1.0 / static_cast<double>(cfg.trials_per_boot);
        for (std::size_t block = 0; block < 2; ++block) {
          const std::vector<EpochedTrial>& src = block == 0 ? agree : disagree;
          for (std::size_t i = 0; i < N; ++i) {
            double* dst = out->boots.row(block * N + i);
            for (int k = 0; k < cfg.trials_per_boot; ++k) {
              const EpochedTrial& tr = src[rng.uniform_int(src.size())];
              for (std::size_t j = 0; j < d; ++j) dst[j] += tr.data[j];
            }
            for (std::size_t j = 0; j < d; ++j) dst[j] *= inv_b;
            out->boot_labels[block * N + i] = block == 0 ? 1 : 0;
          }
        }
      } else if (grouping.size() == 2) {
        std::vector<EpochedTrial> a, b;
        for (const EpochedTrial* tr : select_trials(sub, grouping[0]))
          a.push_back(prep_trial(*tr, prep, cfg.resample_rate_hz));
        for (const EpochedTrial* tr : select_trials(sub, grouping[1]))
          b.push_back(prep_trial(*tr, prep, cfg.resample_rate_hz));
        out->boots = bootstrap_pairs(as_ptrs(a), as_ptrs(b), cfg, sub.subject_id);
      } else {
        GroupingSpec spec;  // default: every trial
        if (!grouping.empty()) spec = grouping[0];
        std::vector<EpochedTrial> sel;
        for (const EpochedTrial* tr : select_trials(sub, spec))
          sel.push_back(prep_trial(*tr, prep, cfg.resample_rate_hz));
        out->boots = rows_to_matrix(bootstrap_trials(as_ptrs(sel), cfg, sub.subject_id));
      }
      built[pi] = std::move(out);
    } catch (const EmptySelection&) {
      failures[pi] = sub.subject_id;
    }
  }, threads);

  for (std::size_t pi = 0; pi < built.size(); ++pi) {
    if (built[pi]) cohort.subjects.push_back(std::move(*built[pi]));
    else cohort.excluded.push_back(failures[pi]);
  }
  if (!cohort.excluded.empty())
    std::fprintf(stderr, "note: %zu subject(s) excluded (no trials for the condition)\n",
                 cohort.excluded.size());
  return cohort;
}

struct EngineResult {
  std::vector<SubjectProbability> probs;
  std::vector<int> labels;
  double auc = 0.5;
  int n_folds = 0;
  std::vector<std::unique_ptr<TrainedClassifier>> fold_models;
};

// Subject-level P from a trained model: fraction of the subject's bootstrap
// rows predicted positive (strictly above 0.5).
double subject_p(const TrainedClassifier& model, const Matrix& boots) {
  const std::vector<double> proba = model.predict_proba(boots);
  std::size_t cnt = 0;
  for (double p : proba)
    if (p > 0.5) ++cnt;
  return static_cast<double>(cnt) / static_cast<double>(proba.size());
}

Matrix stack_boots(const std::vector<BootSubject>& subjects,
                   const std::vector<std::size_t>& members, std::vector<int>& y_out,
                   bool response_mode) {
  std::size_t rows = 0;
  for (std::size_t i : members) rows += subjects[i].boots.rows;
  const std::size_t d = subjects[members.front()].boots.cols;
  Matrix X(rows, d);
  y_out.clear();
  y_out.reserve(rows);
  std::size_t r = 0;
  for (std::size_t i : members) {
    const BootSubject& s = subjects[i];
    std::copy(s.boots.data.begin(), s.boots.data.end(), X.row(r));
    r += s.boots.rows;
    if (response_mode)
      y_out.insert(y_out.end(), s.boot_labels.begin(), s.boot_labels.end());
    else
      y_out.insert(y_out.end(), s.boots.rows, s.label);
  }
  return X;
}

EngineResult run_engine(const Cohort& cohort, const ClassifierSpec& clf,
                        const BootstrapConfig& cfg, unsigned threads,
                        const std::vector<const Matrix*>* test_boots_override = nullptr) {
  const std::vector<BootSubject>& subs = cohort.subjects;
  const std::size_t n = subs.size();
  if (n < 2) throw std::runtime_error("subject classification: fewer than 2 usable subjects");

  // Fold assignment.
  std::vector<int> fold(n);
  int n_folds;
  if (cfg.cv == CvScheme::loso) {
    n_folds = static_cast<int>(n);
    for (std::size_t i = 0; i < n; ++i) fold[i] = static_cast<int>(i);
  } else {
    n_folds = 5;
    std::vector<Gender> genders(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      genders[i] = subs[i].gender;
      labels[i] = subs[i].label;
    }
    fold = stratified_folds(genders, labels, n_folds, seed_mix(cfg.rng_seed, 0xF01D));
  }

  EngineResult res;
  res.n_folds = n_folds;
  res.probs.resize(n);
  res.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.labels[i] = subs[i].label;
  res.fold_models.resize(static_cast<std::size_t>(n_folds));

  parallel_for(static_cast<std::size_t>(n_folds), [&](std::size_t f) {
    const std::uint64_t fold_seed =
        seed_mix(seed_mix(cfg.rng_seed, 0xF01D0000ull), static_cast<std::uint64_t>(f));
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i)
      (fold[i] == static_cast<int>(f) ? test : train).push_back(i);
    if (test.empty()) return;  // empty folds possible when n < n_folds

    if (!cohort.response_mode) {
      std::size_t c0 = 0, c1 = 0;
      for (std::size_t i : train) (subs[i].label == 1 ? c1 : c0)++;
      if (c0 == 0 || c1 == 0)
        throw std::runtime_error(
            "subject classification: training fold " + std::to_string(f) +
            " holds a single class; cohort too small or too imbalanced for " +
            to_string(cfg.cv));
    }

    // Inner validation split over training subjects, stratified by class in
    // group mode. Falls back to no selection when a class is too small.
    std::vector<std::size_t> val, inner;
    bool can_select = cfg.n_candidates > 1;
    if (can_select) {
      Rng rng(seed_mix(fold_seed, 7));
      if (cohort.response_mode) {
        std::vector<std::size_t> pool = train;
        rng.shuffle(pool);
        const auto n_val = static_cast<std::size_t>(
            std::ceil(cfg.validation_fraction * static_cast<double>(pool.size())));
        if (n_val >= 1 && n_val < pool.size()) {
          val.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_val));
          inner.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_val), pool.end());
        } else {
          can_select = false;
        }
      } else {
        std::vector<std::size_t> by_class[2];
        for (std::size_t i : train) by_class[subs[i].label == 1 ? 1 : 0].push_back(i);
        if (by_class[0].size() < 2 || by_class[1].size() < 2) {
          can_select = false;
        } else {
          for (auto& cls : by_class) {
            rng.shuffle(cls);
            const auto n_val = static_cast<std::size_t>(
                std::ceil(cfg.validation_fraction * static_cast<double>(cls.size())));
            val.insert(val.end(), cls.begin(),
                       cls.begin() + static_cast<std::ptrdiff_t>(n_val));
            inner.insert(inner.end(), cls.begin() + static_cast<std::ptrdiff_t>(n_val),
                         cls.end());
          }
        }
      }
    }
    if (!can_select) inner = train;

    std::vector<int> y_train;
    const Matrix X_train = stack_boots(subs, inner, y_train, cohort.response_mode);

    const int n_cand = can_select ? cfg.n_candidates : 1;
    std::unique_ptr<TrainedClassifier> best;
    double best_score = -1.0;
    for (int k = 0; k < n_cand; ++k) {
      auto model = train_classifier(clf, X_train, y_train,
                                    seed_mix(fold_seed, 1000 + static_cast<std::uint64_t>(k)),
                                    cfg.oversample_minority);
      double score = 0.0;
      if (can_select) {
        if (cohort.response_mode) {
          // Pooled bootstrap-level AUC over the validation subjects.
          std::vector<double> proba;
          std::vector<int> lab;
          for (std::size_t i : val) {
            const std::vector<double> p = model->predict_proba(subs[i].boots);
            proba.insert(proba.end(), p.begin(), p.end());
            lab.insert(lab.end(), subs[i].boot_labels.begin(), subs[i].boot_labels.end());
          }
          score = auc(proba, lab);
        } else {
          std::vector<double> ps;
          std::vector<int> lab;
          for (std::size_t i : val) {
            ps.push_back(subject_p(*model, subs[i].boots));
            lab.push_back(subs[i].label);
          }
          score = auc(ps, lab);
        }
      }
      if (score > best_score) {
        best_score = score;
        best = std::move(model);
      }
    }

    for (std::size_t i : test) {
      const Matrix& boots = test_boots_override && (*test_boots_override)[i]
                                ? *(*test_boots_override)[i]
                                : subs[i].boots;
      SubjectProbability& sp = res.probs[i];
      sp.subject_id = subs[i].id;
      if (cohort.response_mode) {
        sp.p_positive_class = auc(best->predict_proba(boots), subs[i].boot_labels);
        sp.n_boot_used = static_cast<int>(boots.rows);
      } else {
        sp.p_positive_class = subject_p(*best, boots);
        sp.n_boot_used = static_cast<int>(boots.rows);
      }
    }
    res.fold_models[f] = std::move(best);
  }, threads);

  if (cohort.response_mode) {
    // Mean of per-subject bootstrap AUCs.
    double m = 0.0;
    for (const SubjectProbability& sp : res.probs) m += sp.p_positive_class;
    res.auc = m / static_cast<double>(res.probs.size());
  } else {
    std::vector<double> ps(n);
    for (std::size_t i = 0; i < n; ++i) ps[i] = res.probs[i].p_positive_class;
    res.auc = auc(ps, res.labels);
  }
  return res;
}

std::string class_doc(const std::pair<std::set<Group>, std::set<Group>>& classes) {
  auto join = [](const std::set<Group>& s) {
    std::string out;
    for (Group g : s) out += to_string(g);
    return out;
  };
  return join(classes.second) + " (positive) vs " + join(classes.first);
}

}  // namespace

SubjectClfResult run_subject_classification(
    const Dataset& ds, const std::vector<GroupingSpec>& grouping,
    const std::pair<std::set<Group>, std::set<Group>>& classes,
    const ClassifierSpec& clf, const BootstrapConfig& cfg, const PrepConfig& prep,
    unsigned threads) {
  const Cohort cohort = build_cohort(ds, grouping, classes, cfg, prep, all_trials, threads);
  EngineResult er = run_engine(cohort, clf, cfg, threads);
  SubjectClfResult out;
  out.probs = std::move(er.probs);
  out.labels = std::move(er.labels);
  out.excluded = cohort.excluded;
  out.auc = er.auc;
  out.n_folds = er.n_folds;
  out.positive_class = cfg.target_label == TargetLabel::response
                           ? "agree (within-subject bootstraps)"
                           : class_doc(classes);
  return out;
}

TransferResult transfer_eval(const Dataset& ds, const std::vector<GroupingSpec>& grouping,
                             const std::pair<std::set<Group>, std::set<Group>>& classes,
                             const ClassifierSpec& clf, const BootstrapConfig& cfg,
                             const PrepConfig& prep, unsigned threads) {
  if (cfg.target_label == TargetLabel::response)
    throw std::runtime_error("transfer_eval: group target only");
  const Cohort cohort = build_cohort(ds, grouping, classes, cfg, prep, all_trials, threads);
  EngineResult er = run_engine(cohort, clf, cfg, threads);

  std::set<Group> trained;
  for (Group g : classes.first) trained.insert(g);
  for (Group g : classes.second) trained.insert(g);

  TransferResult out;
  out.positive_class = class_doc(classes);

  std::map<Group, std::vector<double>> per_group;
  for (std::size_t i = 0; i < cohort.subjects.size(); ++i)
    per_group[cohort.subjects[i].group].push_back(er.probs[i].p_positive_class);

  // Every group outside the training classes gets the mean P over the fold
  // models; no honest out-of-fold slot exists for a group the classifier
  // never trained on.
  for (const SubjectRecord& sub : ds.subjects) {
    if (trained.count(sub.group)) continue;
    try {
      const Matrix boots = [&]() -> Matrix {
        if (grouping.size() == 2) {
          std::vector<EpochedTrial> a, b;
          for (const EpochedTrial* tr : select_trials(sub, grouping[0]))
            a.push_back(prep_trial(*tr, prep, cfg.resample_rate_hz));
          for (const EpochedTrial* tr : select_trials(sub, grouping[1]))
            b.push_back(prep_trial(*tr, prep, cfg.resample_rate_hz));
          return bootstrap_pairs(as_ptrs(a), as_ptrs(b), cfg, sub.subject_id);
        }
        GroupingSpec spec;
        if (!grouping.empty()) spec = grouping[0];
        std::vector<EpochedTrial> sel;
        for (const EpochedTrial* tr : select_trials(sub, spec))
          sel.push_back(prep_trial(*tr, prep, cfg.resample_rate_hz));
        return rows_to_matrix(bootstrap_trials(as_ptrs(sel), cfg, sub.subject_id));
      }();
      double p = 0.0;
      int used = 0;
      for (const auto& model : er.fold_models) {
        if (!model) continue;
        p += subject_p(*model, boots);
        ++used;
      }
      if (used > 0) per_group[sub.group].push_back(p / static_cast<double>(used));
    } catch (const EmptySelection&) {
      continue;
    }
  }

  std::vector<std::vector<double>> groups_for_tests;
  for (const auto& [g, ps] : per_group) {
    out.group_order.push_back(g);
    out.per_group_p.push_back(ps);
    double m = 0.0;
    for (double v : ps) m += v;
    out.mean_p.push_back(ps.empty() ? 0.0 : m / static_cast<double>(ps.size()));
    groups_for_tests.push_back(ps);
  }
  std::vector<std::pair<std::size_t, std::size_t>> comparisons;
  for (std::size_t i = 0; i < groups_for_tests.size(); ++i)
    for (std::size_t j = i + 1; j < groups_for_tests.size(); ++j)
      if (groups_for_tests[i].size() >= 2 && groups_for_tests[j].size() >= 2)
        comparisons.push_back({i, j});
  out.tests = ttest_bonferroni(groups_for_tests, comparisons);
  return out;
}

BudgetTable budget_ablation(const Dataset& ds, const std::vector<GroupingSpec>& grouping,
                            const std::pair<std::set<Group>, std::set<Group>>& classes,
                            const ClassifierSpec& clf, const BootstrapConfig& cfg,
                            const PrepConfig& prep, BudgetAxis axis,
                            const std::vector<double>& fractions, unsigned threads) {
  BudgetTable table;
  table.axis = axis;
  table.fractions = fractions;

  for (double frac : fractions) {
    if (!(frac > 0.0 && frac <= 1.0))
      throw std::runtime_error("budget_ablation: fractions must lie in (0, 1]");

    // Fraction-scaled trial subset in original order; own stream per subject,
    // independent of the bootstrap streams so fraction 1.0 is a no-op.
    auto reduce_trials = [&](const SubjectRecord& sub) {
      std::vector<EpochedTrial> out;
      const std::size_t keep = static_cast<std::size_t>(
          std::ceil(frac * static_cast<double>(sub.trials.size())));
      if (keep == 0)
        throw std::runtime_error("budget_ablation: fraction leaves subject " +
                                 sub.subject_id + " with no trials");
      if (keep >= sub.trials.size()) return sub.trials;
      std::vector<std::size_t> idx(sub.trials.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      Rng rng(seed_mix(seed_mix(cfg.rng_seed, 0x7215), hash_str(sub.subject_id)));
      rng.shuffle(idx);
      idx.resize(keep);
      std::sort(idx.begin(), idx.end());
      for (std::size_t i : idx) out.push_back(sub.trials[i]);
      return out;
    };

    double cell_auc;
    switch (axis) {
      case BudgetAxis::trials_train_test: {
        const Cohort cohort =
            build_cohort(ds, grouping, classes, cfg, prep, reduce_trials, threads);
        cell_auc = run_engine(cohort, clf, cfg, threads).auc;
        break;
      }
      case BudgetAxis::trials_test_only: {
        const Cohort full = build_cohort(ds, grouping, classes, cfg, prep, all_trials, threads);
        const Cohort reduced =
            build_cohort(ds, grouping, classes, cfg, prep, reduce_trials, threads);
        if (full.subjects.size() != reduced.subjects.size())
          throw std::runtime_error("budget_ablation: reduction changed the cohort");
        std::vector<const Matrix*> overrides(full.subjects.size(), nullptr);
        for (std::size_t i = 0; i < full.subjects.size(); ++i) {
          if (full.subjects[i].id != reduced.subjects[i].id)
            throw std::runtime_error("budget_ablation: cohort order changed");
          overrides[i] = &reduced.subjects[i].boots;
        }
        cell_auc = run_engine(full, clf, cfg, threads, &overrides).auc;
        break;
      }
      case BudgetAxis::depressed_subjects: {
        // Keep a seeded fraction of positive-class subjects, all negatives.
        std::vector<std::string> pos_ids;
        for (const SubjectRecord& sub : ds.subjects)
          if (classes.second.count(sub.group)) pos_ids.push_back(sub.subject_id);
        const std::size_t keep = static_cast<std::size_t>(
            std::ceil(frac * static_cast<double>(pos_ids.size())));
        if (keep == 0) throw std::runtime_error("budget_ablation: no positive subjects left");
        std::vector<std::size_t> idx(pos_ids.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        Rng rng(seed_mix(cfg.rng_seed, 0xD5));
        rng.shuffle(idx);
        idx.resize(keep);
        std::sort(idx.begin(), idx.end());
        std::set<std::string> kept;
        for (std::size_t i : idx) kept.insert(pos_ids[i]);

        Dataset sub_ds;
        sub_ds.layout = ds.layout;
        sub_ds.provenance = ds.provenance;
        for (const SubjectRecord& sub : ds.subjects) {
          if (classes.second.count(sub.group) && !kept.count(sub.subject_id)) continue;
          sub_ds.subjects.push_back(sub);
        }
        const Cohort cohort =
            build_cohort(sub_ds, grouping, classes, cfg, prep, all_trials, threads);
        cell_auc = run_engine(cohort, clf, cfg, threads).auc;
        break;
      }
      default:
        throw std::runtime_error("budget_ablation: unknown axis");
    }
    table.auc.push_back(cell_auc);
  }
  return table;
}

BehavioralBaselineResult behavioral_baseline(
    const Dataset& ds, const std::pair<std::set<Group>, std::set<Group>>& classes,
    double lambda, std::uint64_t rng_seed) {
  std::vector<std::vector<double>> feats;
  std::vector<int> labels;
  std::vector<std::string> ids;
  for (const SubjectRecord& sub : ds.subjects) {
    int label;
    if (classes.first.count(sub.group)) label = 0;
    else if (classes.second.count(sub.group)) label = 1;
    else continue;
    feats.push_back(behavioral_features(sub));
    labels.push_back(label);
    ids.push_back(sub.subject_id);
  }
  const std::size_t n = feats.size();
  if (n < 3) throw std::runtime_error("behavioral_baseline: fewer than 3 usable subjects");

  FitConfig fit_cfg;
  fit_cfg.lambda = lambda;
  fit_cfg.rng_seed = rng_seed;

  BehavioralBaselineResult out;
  std::vector<double> held_out(n);
  for (std::size_t hold = 0; hold < n; ++hold) {
    Matrix X(n - 1, 4);
    std::vector<int> y;
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == hold) continue;
      std::copy(feats[i].begin(), feats[i].end(), X.row(r));
      y.push_back(labels[i]);
      ++r;
    }
    // Balance the fold like the decoding path: leaving one subject out skews
    // the class ratio against the held-out label, and the intercept would
    // otherwise anti-predict it whenever the features carry no signal.
    Rng os_rng(seed_mix(rng_seed, static_cast<std::uint64_t>(hold)));
    const std::vector<std::size_t> rows = oversample_indices(y, os_rng);
    if (rows.size() != X.rows) {
      Matrix X2(rows.size(), 4);
      std::vector<int> y2(rows.size());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        std::copy(X.row(rows[k]), X.row(rows[k]) + 4, X2.row(k));
        y2[k] = y[rows[k]];
      }
      X = std::move(X2);
      y = std::move(y2);
    }
    const LogRegModel model = fit(X, y, fit_cfg);
    Matrix x(1, 4);
    std::copy(feats[hold].begin(), feats[hold].end(), x.row(0));
    held_out[hold] = predict_proba(model, x)[0];
  }
  out.auc = auc(held_out, labels);
  out.labels = labels;
  for (std::size_t i = 0; i < n; ++i)
    out.probs.push_back({ids[i], held_out[i], 1});

  Matrix X_all(n, 4);
  for (std::size_t i = 0; i < n; ++i)
    std::copy(feats[i].begin(), feats[i].end(), X_all.row(i));
  out.model = fit(X_all, labels, fit_cfg);
  return out;
}

ConfusionMetrics confusion_at_threshold(const std::vector<SubjectProbability>& probs,
                                        const std::vector<int>& labels, double threshold) {
  if (probs.empty() || probs.size() != labels.size())
    throw std::runtime_error("confusion_at_threshold: empty or mismatched input");
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool pred_pos = probs[i].p_positive_class >= threshold;
    if (labels[i] == 1) (pred_pos ? tp : fn)++;
    else (pred_pos ? fp : tn)++;
  }
  if (tp + fn == 0 || tn + fp == 0)
    throw std::runtime_error("confusion_at_threshold: a class is absent");
  return {static_cast<double>(tp) / static_cast<double>(tp + fn),
          static_cast<double>(tn) / static_cast<double>(tn + fp)};
}

}  // namespace eegdec
