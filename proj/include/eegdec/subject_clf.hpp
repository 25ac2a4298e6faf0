#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "eegdec/dataset.hpp"
#include "eegdec/grouping.hpp"
#include "eegdec/logreg.hpp"
#include "eegdec/matrix.hpp"
#include "eegdec/prep.hpp"
#include "eegdec/stats.hpp"

namespace eegdec {

enum class CvScheme { five_fold_stratified_gender, loso };
enum class TargetLabel { group, response };

CvScheme cv_scheme_from_string(const std::string& s);
std::string to_string(CvScheme s);
TargetLabel target_label_from_string(const std::string& s);
std::string to_string(TargetLabel t);

struct BootstrapConfig {
  int n_boot = 200;          // bootstraps per subject (N)
  int trials_per_boot = 20;  // trials averaged per bootstrap (B)
  std::uint64_t rng_seed = 0;
  CvScheme cv = CvScheme::five_fold_stratified_gender;
  bool oversample_minority = true;
  TargetLabel target_label = TargetLabel::group;
  // Trials are block-mean resampled to this rate before feature flattening;
  // absent keeps the native rate.
  std::optional<double> resample_rate_hz = 200.0;
  // Share of training subjects carved out (stratified by class) to pick the
  // best of n_candidates independently-seeded fits.
  double validation_fraction = 0.2;
  int n_candidates = 3;
};

struct SubjectProbability {
  std::string subject_id;
  double p_positive_class = 0.0;  // fraction of the subject's bootstraps
                                  // predicted positive; N*p is an integer
  int n_boot_used = 0;
};

enum class ClassifierKind { sparse_logreg, mlp_1hidden };

ClassifierKind classifier_kind_from_string(const std::string& s);
std::string to_string(ClassifierKind k);

// Pluggable classifier: kind plus kind-specific hyperparameters.
//   sparse_logreg: lambda (0.1), max_iter (500), tol (1e-6), init_jitter (0)
//   mlp_1hidden:   hidden (16), lr (0.05), epochs (200), init_scale (0.1)
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::sparse_logreg;
  std::map<std::string, double> hyperparams;
};

class TrainedClassifier {
 public:
  virtual ~TrainedClassifier() = default;
  virtual std::vector<double> predict_proba(const Matrix& X) const = 0;
};

// Trains one candidate model; oversampling (when requested) and any random
// initialization draw from the given seed only.
std::unique_ptr<TrainedClassifier> train_classifier(const ClassifierSpec& spec,
                                                    const Matrix& X,
                                                    const std::vector<int>& y,
                                                    std::uint64_t seed, bool oversample);

// N bootstrapped trial means: each output vector is the flattened
// [channels x samples] elementwise mean of B trials drawn uniformly with
// replacement. The stream derives from (cfg.rng_seed, subject_id), so results
// do not depend on which thread or fold asks.
std::vector<std::vector<double>> bootstrap_trials(
    const std::vector<const EpochedTrial*>& trials, const BootstrapConfig& cfg,
    const std::string& subject_id);

// Fold assignment stratified jointly by gender and class: within each gender,
// subjects are dealt round-robin (class-contiguous, seeded shuffle within
// class), with the dealing position carried across genders. Every fold's
// gender count is within one of any other fold's. Exposed for testing.
std::vector<int> stratified_folds(const std::vector<Gender>& genders,
                                  const std::vector<int>& labels, int n_folds,
                                  std::uint64_t seed);

struct SubjectClfResult {
  std::vector<SubjectProbability> probs;  // one per included subject
  std::vector<int> labels;                // aligned; 1 = positive class
  std::vector<std::string> excluded;      // subjects without required trials
  double auc = 0.5;
  int n_folds = 0;
  std::string positive_class;  // report header documentation
};

// Bootstrapped subject-level classification.
//
// group target: subjects of classes.first form class 0, classes.second class 1
// (the positive, "depressed" side). Per CV fold, training rows are every
// training subject's N bootstrapped means (side-a minus side-b bootstrap pairs
// when two grouping specs are given); the best of n_candidates seeded fits is
// chosen by subject-level AUC on a stratified validation split; each test
// subject's P is the fraction of its N bootstraps predicted positive (proba >
// 0.5), and the reported AUC compares P against class membership.
//
// response target: classes select the cohort; within every subject agree
// trials (positive) and disagree trials are bootstrapped separately, the
// classifier learns agree-vs-disagree across training subjects' bootstraps,
// and each test subject's entry carries its own bootstrap-level AUC in
// p_positive_class (n_boot_used = 2N); the reported AUC is the mean of those
// per-subject AUCs.
SubjectClfResult run_subject_classification(
    const Dataset& ds, const std::vector<GroupingSpec>& grouping,
    const std::pair<std::set<Group>, std::set<Group>>& classes,
    const ClassifierSpec& clf, const BootstrapConfig& cfg, const PrepConfig& prep,
    unsigned threads = 0);

struct TransferResult {
  std::vector<Group> group_order;          // row order of the vectors below
  std::vector<std::vector<double>> per_group_p;
  std::vector<double> mean_p;
  std::vector<TTestResult> tests;          // pairwise over group_order, Bonferroni
  std::string positive_class;
};

// Trains classes.first-vs-classes.second and predicts every group in the
// dataset. Training-class subjects receive their honest out-of-fold P; other
// groups receive the mean P over the fold models.
TransferResult transfer_eval(const Dataset& ds, const std::vector<GroupingSpec>& grouping,
                             const std::pair<std::set<Group>, std::set<Group>>& classes,
                             const ClassifierSpec& clf, const BootstrapConfig& cfg,
                             const PrepConfig& prep, unsigned threads = 0);

enum class BudgetAxis { trials_train_test, trials_test_only, depressed_subjects };

BudgetAxis budget_axis_from_string(const std::string& s);
std::string to_string(BudgetAxis a);

struct BudgetTable {
  BudgetAxis axis = BudgetAxis::trials_train_test;
  std::vector<double> fractions;
  std::vector<double> auc;  // aligned with fractions
};

// Seeded subsampling along one axis, rerunning the classification per
// fraction. fraction = 1.0 reproduces the un-ablated run bit-exactly: the
// subsampling streams are separate from the bootstrap streams.
BudgetTable budget_ablation(const Dataset& ds, const std::vector<GroupingSpec>& grouping,
                            const std::pair<std::set<Group>, std::set<Group>>& classes,
                            const ClassifierSpec& clf, const BootstrapConfig& cfg,
                            const PrepConfig& prep, BudgetAxis axis,
                            const std::vector<double>& fractions, unsigned threads = 0);

struct BehavioralBaselineResult {
  double auc = 0.5;
  LogRegModel model;  // fit on all subjects, for inspection
  std::vector<SubjectProbability> probs;
  std::vector<int> labels;
};

// LOSOCV sparse-logreg on the 4-dimensional response-profile features.
BehavioralBaselineResult behavioral_baseline(
    const Dataset& ds, const std::pair<std::set<Group>, std::set<Group>>& classes,
    double lambda = 0.1, std::uint64_t rng_seed = 0);

struct ConfusionMetrics {
  double sensitivity = 0.0;
  double specificity = 0.0;
};

// Positive prediction at p >= threshold.
ConfusionMetrics confusion_at_threshold(const std::vector<SubjectProbability>& probs,
                                        const std::vector<int>& labels,
                                        double threshold = 0.5);

}  // namespace eegdec
