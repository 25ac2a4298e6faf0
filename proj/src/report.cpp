#include "eegdec/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

namespace eegdec {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("fmt_double: conversion failed");
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string decoding_csv(const DecodingTimeSeries& dts) {
  std::string out = "time_ms,seed,auc\n";
  for (std::size_t t = 0; t < dts.timepoints_ms.size(); ++t)
    for (std::size_t s = 0; s < dts.auc_per_seed.rows; ++s) {
      out += fmt_double(dts.timepoints_ms[t]);
      out += ',';
      out += std::to_string(s);
      out += ',';
      out += fmt_double(dts.auc_per_seed.at(s, t));
      out += '\n';
    }
  return out;
}

std::string decoding_mean_csv(const DecodingTimeSeries& dts) {
  std::string out = "time_ms,mean_auc\n";
  for (std::size_t t = 0; t < dts.timepoints_ms.size(); ++t) {
    out += fmt_double(dts.timepoints_ms[t]);
    out += ',';
    out += fmt_double(dts.mean_auc[t]);
    out += '\n';
  }
  return out;
}

std::string importance_csv(const std::vector<std::string>& channel_names,
                           const ChannelImportanceMap& map) {
  if (channel_names.size() != map.proportion.size())
    throw std::runtime_error("importance_csv: channel count mismatch");
  std::string out = "channel,proportion\n";
  for (std::size_t c = 0; c < channel_names.size(); ++c) {
    out += csv_field(channel_names[c]);
    out += ',';
    out += fmt_double(map.proportion[c]);
    out += '\n';
  }
  return out;
}

std::string cluster_json(const ClusterResult& res) {
  nlohmann::ordered_json j;
  j["timepoints_ms"] = res.timepoints_ms;
  j["observed"] = res.observed;
  j["pointwise_p"] = res.pointwise_p;
  j["clusters"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < res.clusters.size(); ++i) {
    const Cluster& c = res.clusters[i];
    const bool sig = std::find(res.significant.begin(), res.significant.end(), i) !=
                     res.significant.end();
    j["clusters"].push_back({{"start_ms", c.start_ms},
                             {"end_ms", c.end_ms},
                             {"mass", c.mass},
                             {"p_cluster", c.p_cluster},
                             {"significant", sig}});
  }
  return j.dump(2) + "\n";
}

std::string excluded_csv(const std::vector<std::string>& subject_ids) {
  std::string out = "subject_id\n";
  for (const std::string& id : subject_ids) {
    out += csv_field(id);
    out += '\n';
  }
  return out;
}

namespace {
std::string significance_mark(double p) {
  if (p <= 0.001) return "**";
  if (p < 0.05) return "*";
  return "";
}
}  // namespace

std::string classify_csv(const std::vector<ClassifyRow>& rows) {
  std::string out = "condition,trial_type,task,auc,ci_lo,ci_hi,p_vs_chance,significance\n";
  for (const ClassifyRow& r : rows) {
    out += csv_field(r.condition);
    out += ',';
    out += csv_field(r.trial_type);
    out += ',';
    out += csv_field(r.task);
    out += ',';
    out += fmt_double(r.stats.auc);
    out += ',';
    out += fmt_double(r.stats.ci_lo);
    out += ',';
    out += fmt_double(r.stats.ci_hi);
    out += ',';
    out += fmt_double(r.stats.p_vs_chance);
    out += ',';
    out += significance_mark(r.stats.p_vs_chance);
    out += '\n';
  }
  return out;
}

std::string probabilities_json(const std::string& task, const std::string& positive_class,
                               const std::vector<SubjectProbability>& probs,
                               const std::vector<int>& labels) {
  if (probs.size() != labels.size())
    throw std::runtime_error("probabilities_json: size mismatch");
  nlohmann::ordered_json j;
  j["task"] = task;
  j["positive_class"] = positive_class;
  j["subjects"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < probs.size(); ++i)
    j["subjects"].push_back({{"subject_id", probs[i].subject_id},
                             {"p", probs[i].p_positive_class},
                             {"n_boot", probs[i].n_boot_used},
                             {"label", labels[i]}});
  return j.dump(2) + "\n";
}

std::string transfer_csv(const TransferResult& res) {
  std::string out = "group,n,mean_p\n";
  for (std::size_t i = 0; i < res.group_order.size(); ++i) {
    out += to_string(res.group_order[i]);
    out += ',';
    out += std::to_string(res.per_group_p[i].size());
    out += ',';
    out += fmt_double(res.mean_p[i]);
    out += '\n';
  }
  out += "group_a,group_b,t,df,p_raw,p_adj,significant\n";
  for (const TTestResult& t : res.tests) {
    out += to_string(res.group_order[t.group_a]);
    out += ',';
    out += to_string(res.group_order[t.group_b]);
    out += ',';
    out += fmt_double(t.t);
    out += ',';
    out += fmt_double(t.df);
    out += ',';
    out += fmt_double(t.p_raw);
    out += ',';
    out += fmt_double(t.p_adj);
    out += ',';
    out += t.significant ? "1" : "0";
    out += '\n';
  }
  return out;
}

std::string budget_csv(const BudgetTable& table) {
  std::string out = "axis,fraction,auc\n";
  for (std::size_t i = 0; i < table.fractions.size(); ++i) {
    out += to_string(table.axis);
    out += ',';
    out += fmt_double(table.fractions[i]);
    out += ',';
    out += fmt_double(table.auc[i]);
    out += '\n';
  }
  return out;
}

std::string nb_table_csv(const NbTable& table) {
  std::string out = table.param_name;
  for (const std::string& cond : table.conditions)
    out += "," + cond + "_auc," + cond + "_ci_lo," + cond + "_ci_hi";
  out += '\n';
  if (table.cells.size() != table.param_values.size())
    throw std::runtime_error("nb_table_csv: row count mismatch");
  for (std::size_t i = 0; i < table.param_values.size(); ++i) {
    if (table.cells[i].size() != table.conditions.size())
      throw std::runtime_error("nb_table_csv: column count mismatch");
    out += std::to_string(table.param_values[i]);
    for (const AucWithCi& cell : table.cells[i]) {
      out += ',';
      out += fmt_double(cell.auc);
      out += ',';
      out += fmt_double(cell.ci_lo);
      out += ',';
      out += fmt_double(cell.ci_hi);
    }
    out += '\n';
  }
  return out;
}

std::string correlations_csv(const std::vector<CorrelationRow>& rows) {
  std::string out = "group,questionnaire,n,rho,p_value,note\n";
  for (const CorrelationRow& r : rows) {
    out += csv_field(r.group);
    out += ',';
    out += csv_field(r.questionnaire);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += r.skipped ? "" : fmt_double(r.rho);
    out += ',';
    out += r.skipped ? "" : fmt_double(r.p_value);
    out += ',';
    out += csv_field(r.note);
    out += '\n';
  }
  return out;
}

}  // namespace eegdec
