#pragma once

#include <string>
#include <vector>

#include "eegdec/cluster.hpp"
#include "eegdec/mvpa.hpp"
#include "eegdec/stats.hpp"
#include "eegdec/subject_clf.hpp"

namespace eegdec {

// Plot-ready CSV/JSON serialization. Everything here is deterministic: no
// timestamps, no locale dependence, doubles printed as their shortest
// round-trip decimal form.

// Shortest decimal string that parses back to exactly v.
std::string fmt_double(double v);

// RFC-4180 quoting, applied only when the field needs it.
std::string csv_field(const std::string& s);

// Writes content atomically enough for our purposes (single write, truncate).
void write_text_file(const std::string& path, const std::string& content);

// decoding.csv: one row per (timepoint, seed): time_ms,seed,auc
std::string decoding_csv(const DecodingTimeSeries& dts);

// decoding_mean.csv: time_ms,mean_auc
std::string decoding_mean_csv(const DecodingTimeSeries& dts);

// importance.csv: channel,proportion (order follows channel_names)
std::string importance_csv(const std::vector<std::string>& channel_names,
                           const ChannelImportanceMap& map);

// clusters.json: observed series, pointwise p, cluster list with masses,
// p-values and significance flags.
std::string cluster_json(const ClusterResult& res);

// excluded.csv: subject_id per row (header always present)
std::string excluded_csv(const std::vector<std::string>& subject_ids);

// One classification table cell.
struct ClassifyRow {
  std::string condition;   // e.g. "Sentence Sentiment"
  std::string trial_type;  // e.g. "Positive", "Contrasting"
  std::string task;        // e.g. "C_vs_DS", "D_vs_S"
  AucWithCi stats;
};

// classify.csv: condition,trial_type,task,auc,ci_lo,ci_hi,p_vs_chance,significance
// significance: "**" when p <= 0.001, "*" when p < 0.05, empty otherwise.
std::string classify_csv(const std::vector<ClassifyRow>& rows);

// Per-subject probabilities for one task, consumed by the correlation step.
std::string probabilities_json(const std::string& task, const std::string& positive_class,
                               const std::vector<SubjectProbability>& probs,
                               const std::vector<int>& labels);

// transfer.csv: group,n,mean_p rows followed by pairwise test rows.
std::string transfer_csv(const TransferResult& res);

// budget.csv: axis,fraction,auc
std::string budget_csv(const BudgetTable& table);

// Bootstrap-hyperparameter sweep: one row per parameter value, one AUC + CI
// column triple per condition.
struct NbTable {
  std::string param_name;  // "N" (bootstraps per subject) or "B" (trials per bootstrap)
  std::vector<int> param_values;
  std::vector<std::string> conditions;
  std::vector<std::vector<AucWithCi>> cells;  // [param][condition]
};

// nb_table.csv: <param_name>,<cond>_auc,<cond>_ci_lo,<cond>_ci_hi,...
std::string nb_table_csv(const NbTable& table);

struct CorrelationRow {
  std::string group;          // subject group the correlation is computed in
  std::string questionnaire;  // score column name
  std::size_t n = 0;
  double rho = 0.0;
  double p_value = 1.0;
  bool skipped = false;       // scores or variance missing
  std::string note;           // reason when skipped
};

// correlations.csv: group,questionnaire,n,rho,p_value,note
std::string correlations_csv(const std::vector<CorrelationRow>& rows);

}  // namespace eegdec
