#include "eegdec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace eegdec {

static_assert(sizeof(float) == 4, "float32 storage assumed");

std::string to_string(Region r) {
  switch (r) {
    case Region::anterior: return "anterior";
    case Region::central: return "central";
    case Region::posterior: return "posterior";
  }
  return "?";
}
std::string to_string(Group g) {
  switch (g) {
    case Group::C: return "C";
    case Group::D: return "D";
    case Group::S: return "S";
  }
  return "?";
}
std::string to_string(Gender g) {
  switch (g) {
    case Gender::male: return "male";
    case Gender::female: return "female";
    case Gender::other: return "other";
  }
  return "?";
}
std::string to_string(Sentiment s) {
  switch (s) {
    case Sentiment::positive: return "positive";
    case Sentiment::negative: return "negative";
    case Sentiment::neutral: return "neutral";
  }
  return "?";
}
std::string to_string(Response r) {
  switch (r) {
    case Response::agree: return "agree";
    case Response::disagree: return "disagree";
    case Response::none: return "none";
  }
  return "?";
}

namespace {
[[noreturn]] void bad_token(const char* what, const std::string& s) {
  throw std::runtime_error(std::string("unknown ") + what + " token: '" + s + "'");
}
}  // namespace

Region region_from_string(const std::string& s) {
  if (s == "anterior") return Region::anterior;
  if (s == "central") return Region::central;
  if (s == "posterior") return Region::posterior;
  bad_token("region", s);
}
Group group_from_string(const std::string& s) {
  if (s == "C") return Group::C;
  if (s == "D") return Group::D;
  if (s == "S") return Group::S;
  bad_token("group", s);
}
Gender gender_from_string(const std::string& s) {
  if (s == "male") return Gender::male;
  if (s == "female") return Gender::female;
  if (s == "other") return Gender::other;
  bad_token("gender", s);
}
Sentiment sentiment_from_string(const std::string& s) {
  if (s == "positive") return Sentiment::positive;
  if (s == "negative") return Sentiment::negative;
  if (s == "neutral") return Sentiment::neutral;
  bad_token("sentiment", s);
}
Response response_from_string(const std::string& s) {
  if (s == "agree") return Response::agree;
  if (s == "disagree") return Response::disagree;
  if (s == "none") return Response::none;
  bad_token("response", s);
}

std::vector<std::size_t> ChannelLayout::indices_for_region(Region r) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = region_map.find(names[i]);
    if (it != region_map.end() && it->second == r) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> ChannelLayout::indices_for_names(
    const std::vector<std::string>& want) const {
  std::vector<std::size_t> out;
  out.reserve(want.size());
  for (const auto& w : want) {
    const int idx = index_of(w);
    if (idx < 0) throw std::runtime_error("channel not in layout: '" + w + "'");
    out.push_back(static_cast<std::size_t>(idx));
  }
  return out;
}

int ChannelLayout::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

Region region_for_channel_name(const std::string& name) {
  auto starts = [&](const char* p) { return name.rfind(p, 0) == 0; };
  if (starts("Fp") || starts("AF")) return Region::anterior;
  if (starts("FC") || starts("CP")) return Region::central;
  if (starts("PO")) return Region::posterior;
  if (starts("F")) return Region::anterior;
  if (starts("C") || starts("T")) return Region::central;
  if (starts("P") || starts("O")) return Region::posterior;
  return Region::central;
}

std::vector<Violation> validate(const Dataset& ds) {
  std::vector<Violation> out;
  auto add = [&](const std::string& sid, int trial, std::string msg) {
    out.push_back({sid, trial, std::move(msg)});
  };

  if (ds.layout.names.empty()) add("", -1, "layout has no channels");
  {
    std::set<std::string> seen;
    for (const auto& n : ds.layout.names)
      if (!seen.insert(n).second) add("", -1, "duplicate channel name '" + n + "'");
    for (const auto& n : ds.layout.names)
      if (ds.layout.region_map.find(n) == ds.layout.region_map.end())
        add("", -1, "channel '" + n + "' has no region");
  }

  std::set<std::string> ids;
  for (const auto& sub : ds.subjects) {
    if (!ids.insert(sub.subject_id).second)
      add(sub.subject_id, -1, "duplicate subject_id");
    bool first = true;
    double rate = 0.0, start = 0.0;
    std::size_t nsamp = 0;
    for (std::size_t k = 0; k < sub.trials.size(); ++k) {
      const auto& tr = sub.trials[k];
      const int ki = static_cast<int>(k);
      if (tr.n_channels != ds.layout.size())
        add(sub.subject_id, ki, "channel count does not match layout");
      if (tr.n_samples < 1) add(sub.subject_id, ki, "trial has no samples");
      if (tr.sample_rate_hz <= 0.0) add(sub.subject_id, ki, "nonpositive sample rate");
      if (tr.data.size() != tr.n_channels * tr.n_samples)
        add(sub.subject_id, ki, "data size does not match declared shape");
      for (double v : tr.data) {
        if (!std::isfinite(v)) {
          add(sub.subject_id, ki, "non-finite sample value");
          break;
        }
      }
      const bool responded = tr.meta.response != Response::none;
      if (responded != tr.meta.response_time_ms.has_value())
        add(sub.subject_id, ki,
            responded ? "response present but response_time_ms absent"
                      : "response_time_ms present without a response");
      if (tr.meta.response_time_ms && *tr.meta.response_time_ms < 0.0)
        add(sub.subject_id, ki, "negative response_time_ms");
      if (first) {
        rate = tr.sample_rate_hz;
        start = tr.epoch_start_ms;
        nsamp = tr.n_samples;
        first = false;
      } else if (tr.sample_rate_hz != rate || tr.epoch_start_ms != start ||
                 tr.n_samples != nsamp) {
        add(sub.subject_id, ki, "trial shape/timing differs from subject's first trial");
      }
    }
  }
  return out;
}

namespace {

json layout_to_json(const ChannelLayout& layout) {
  json regions = json::object();
  for (const auto& [name, r] : layout.region_map) regions[name] = to_string(r);
  return json{{"channels", layout.names}, {"regions", regions}};
}

std::string meta_csv_line(int index, const TrialMeta& m) {
  std::ostringstream os;
  os << index << ',' << m.sentence_id << ',' << to_string(m.sentiment) << ','
     << to_string(m.last_word_valence) << ',' << to_string(m.response) << ',';
  if (m.response_time_ms) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", *m.response_time_ms);
    os << buf;
  }
  return os.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

TrialMeta parse_meta_row(const std::vector<std::string>& cols, const std::string& sid,
                         std::size_t lineno) {
  auto ctx = [&](const std::string& msg) {
    return "subject " + sid + " meta line " + std::to_string(lineno) + ": " + msg;
  };
  if (cols.size() != 6) throw std::runtime_error(ctx("expected 6 columns"));
  TrialMeta m;
  try {
    m.sentence_id = std::stoi(cols[1]);
  } catch (const std::exception&) {
    throw std::runtime_error(ctx("bad sentence_id '" + cols[1] + "'"));
  }
  try {
    m.sentiment = sentiment_from_string(cols[2]);
    m.last_word_valence = sentiment_from_string(cols[3]);
    m.response = response_from_string(cols[4]);
  } catch (const std::exception& e) {
    throw std::runtime_error(ctx(e.what()));
  }
  if (!cols[5].empty()) {
    try {
      m.response_time_ms = std::stod(cols[5]);
    } catch (const std::exception&) {
      throw std::runtime_error(ctx("bad response_time_ms '" + cols[5] + "'"));
    }
  }
  return m;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& dir) {
  fs::create_directories(dir);

  json manifest;
  manifest["version"] = 1;
  double rate = 0.0, start = 0.0;
  std::size_t nsamp = 0;
  for (const auto& sub : ds.subjects) {
    if (!sub.trials.empty()) {
      rate = sub.trials[0].sample_rate_hz;
      start = sub.trials[0].epoch_start_ms;
      nsamp = sub.trials[0].n_samples;
      break;
    }
  }
  manifest["sample_rate_hz"] = rate;
  manifest["epoch_start_ms"] = start;
  manifest["n_samples"] = nsamp;
  const json lj = layout_to_json(ds.layout);
  manifest["channels"] = lj["channels"];
  manifest["regions"] = lj["regions"];
  if (!ds.provenance.empty()) manifest["provenance"] = ds.provenance;

  json subjects = json::array();
  for (const auto& sub : ds.subjects) {
    const std::string data_file = sub.subject_id + ".f32";
    const std::string meta_file = sub.subject_id + ".meta.csv";
    json q = json::object();
    for (const auto& [k, v] : sub.questionnaires) q[k] = v;
    subjects.push_back(json{{"subject_id", sub.subject_id},
                            {"group", to_string(sub.group)},
                            {"gender", to_string(sub.gender)},
                            {"questionnaires", q},
                            {"n_trials", sub.trials.size()},
                            {"data_file", data_file},
                            {"meta_file", meta_file}});

    std::ofstream bin(fs::path(dir) / data_file, std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write " + data_file + " under " + dir);
    std::vector<float> buf;
    for (const auto& tr : sub.trials) {
      buf.resize(tr.data.size());
      for (std::size_t i = 0; i < tr.data.size(); ++i)
        buf[i] = static_cast<float>(tr.data[i]);
      bin.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
    if (!bin) throw std::runtime_error("write failed for " + data_file);

    std::ofstream meta(fs::path(dir) / meta_file);
    if (!meta) throw std::runtime_error("cannot write " + meta_file + " under " + dir);
    meta << "trial_index,sentence_id,sentiment,last_word_valence,response,response_time_ms\n";
    for (std::size_t k = 0; k < sub.trials.size(); ++k)
      meta << meta_csv_line(static_cast<int>(k), sub.trials[k].meta) << '\n';
    if (!meta) throw std::runtime_error("write failed for " + meta_file);
  }
  manifest["subjects"] = subjects;

  std::ofstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw std::runtime_error("cannot write manifest.json under " + dir);
  mf << manifest.dump(2) << '\n';
  if (!mf) throw std::runtime_error("write failed for manifest.json");
}

Dataset load_dataset(const std::string& dir) {
  const fs::path root(dir);
  const fs::path mpath = root / "manifest.json";
  std::ifstream mf(mpath);
  if (!mf) throw std::runtime_error("missing manifest: " + mpath.string());
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw std::runtime_error("manifest parse error in " + mpath.string() + ": " + e.what());
  }
  if (manifest.value("version", 0) != 1)
    throw std::runtime_error("unsupported manifest version in " + mpath.string());

  Dataset ds;
  const double rate = manifest.at("sample_rate_hz").get<double>();
  const double start = manifest.at("epoch_start_ms").get<double>();
  const std::size_t nsamp = manifest.at("n_samples").get<std::size_t>();
  ds.layout.names = manifest.at("channels").get<std::vector<std::string>>();
  if (manifest.contains("regions")) {
    for (const auto& [name, r] : manifest.at("regions").items())
      ds.layout.region_map[name] = region_from_string(r.get<std::string>());
  }
  for (const auto& n : ds.layout.names)
    if (ds.layout.region_map.find(n) == ds.layout.region_map.end())
      ds.layout.region_map[n] = region_for_channel_name(n);
  ds.provenance = manifest.value("provenance", std::string{});

  const std::size_t n_ch = ds.layout.names.size();
  for (const auto& js : manifest.at("subjects")) {
    SubjectRecord sub;
    sub.subject_id = js.at("subject_id").get<std::string>();
    sub.group = group_from_string(js.at("group").get<std::string>());
    sub.gender = gender_from_string(js.at("gender").get<std::string>());
    if (js.contains("questionnaires"))
      for (const auto& [k, v] : js.at("questionnaires").items())
        sub.questionnaires[k] = v.get<int>();
    const std::size_t n_trials = js.at("n_trials").get<std::size_t>();
    const fs::path dpath = root / js.at("data_file").get<std::string>();
    const fs::path mpath2 = root / js.at("meta_file").get<std::string>();

    std::ifstream bin(dpath, std::ios::binary);
    if (!bin)
      throw std::runtime_error("subject " + sub.subject_id + ": missing data file " +
                               dpath.string());
    const std::uintmax_t expect =
        static_cast<std::uintmax_t>(n_trials) * n_ch * nsamp * sizeof(float);
    const std::uintmax_t actual = fs::file_size(dpath);
    if (actual != expect)
      throw std::runtime_error("subject " + sub.subject_id + ": data file " +
                               dpath.string() + " holds " + std::to_string(actual) +
                               " bytes, manifest shape needs " + std::to_string(expect));

    std::ifstream meta(mpath2);
    if (!meta)
      throw std::runtime_error("subject " + sub.subject_id + ": missing meta file " +
                               mpath2.string());
    std::string line;
    if (!std::getline(meta, line))
      throw std::runtime_error("subject " + sub.subject_id + ": empty meta file");
    std::vector<TrialMeta> metas;
    std::size_t lineno = 1;
    while (std::getline(meta, line)) {
      ++lineno;
      if (line.empty()) continue;
      metas.push_back(parse_meta_row(split_csv(line), sub.subject_id, lineno));
    }
    if (metas.size() != n_trials)
      throw std::runtime_error("subject " + sub.subject_id + ": manifest declares " +
                               std::to_string(n_trials) + " trials, meta file has " +
                               std::to_string(metas.size()));

    std::vector<float> buf(n_ch * nsamp);
    for (std::size_t k = 0; k < n_trials; ++k) {
      EpochedTrial tr;
      tr.meta = metas[k];
      tr.n_channels = n_ch;
      tr.n_samples = nsamp;
      tr.sample_rate_hz = rate;
      tr.epoch_start_ms = start;
      bin.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)));
      if (!bin)
        throw std::runtime_error("subject " + sub.subject_id + ": short read at trial " +
                                 std::to_string(k));
      tr.data.resize(buf.size());
      for (std::size_t i = 0; i < buf.size(); ++i) {
        tr.data[i] = static_cast<double>(buf[i]);
        if (!std::isfinite(tr.data[i]))
          throw std::runtime_error("subject " + sub.subject_id + ": non-finite value in trial " +
                                   std::to_string(k) + " at flat offset " + std::to_string(i));
      }
      sub.trials.push_back(std::move(tr));
    }
    ds.subjects.push_back(std::move(sub));
  }

  const auto violations = validate(ds);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw std::runtime_error("dataset invalid (" + std::to_string(violations.size()) +
                             " violation(s)); first: subject '" + v.subject_id +
                             "' trial " + std::to_string(v.trial_index) + ": " + v.message);
  }
  return ds;
}

}  // namespace eegdec
