#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eegdec {

enum class Region { anterior, central, posterior };
enum class Group { C, D, S };
enum class Gender { male, female, other };
enum class Sentiment { positive, negative, neutral };
enum class Response { agree, disagree, none };

std::string to_string(Region r);
std::string to_string(Group g);
std::string to_string(Gender g);
std::string to_string(Sentiment s);
std::string to_string(Response r);
Region region_from_string(const std::string& s);
Group group_from_string(const std::string& s);
Gender gender_from_string(const std::string& s);
Sentiment sentiment_from_string(const std::string& s);
Response response_from_string(const std::string& s);

struct ChannelLayout {
  std::vector<std::string> names;
  std::map<std::string, Region> region_map;

  std::size_t size() const { return names.size(); }
  // Indices of all channels mapped to the given region, in layout order.
  std::vector<std::size_t> indices_for_region(Region r) const;
  std::vector<std::size_t> indices_for_names(const std::vector<std::string>& want) const;
  int index_of(const std::string& name) const;
};

// Region assignment by 10-20 name prefix: Fp/AF/F anterior, FC/C/T/CP central,
// P/PO/O posterior. Two-letter prefixes are checked before one-letter ones.
Region region_for_channel_name(const std::string& name);

struct TrialMeta {
  int sentence_id = 0;
  Sentiment sentiment = Sentiment::neutral;
  Sentiment last_word_valence = Sentiment::neutral;
  Response response = Response::none;
  std::optional<double> response_time_ms;
};

// One stimulus presentation. data is row-major [channels][samples] so a
// channel's samples are contiguous; per-timestep slices stride by n_samples.
struct EpochedTrial {
  TrialMeta meta;
  std::vector<double> data;
  std::size_t n_channels = 0;
  std::size_t n_samples = 0;
  double sample_rate_hz = 0.0;
  double epoch_start_ms = 0.0;

  double at(std::size_t ch, std::size_t t) const { return data[ch * n_samples + t]; }
  double& at(std::size_t ch, std::size_t t) { return data[ch * n_samples + t]; }
  // Time of sample t relative to stimulus onset.
  double time_ms(std::size_t t) const {
    return epoch_start_ms + 1000.0 * static_cast<double>(t) / sample_rate_hz;
  }
};

struct SubjectRecord {
  std::string subject_id;
  Group group = Group::C;
  Gender gender = Gender::female;
  std::map<std::string, int> questionnaires;  // keys: phq9_screen, phq9_dayof, sis, gad7
  std::vector<EpochedTrial> trials;
};

struct Dataset {
  ChannelLayout layout;
  std::vector<SubjectRecord> subjects;
  std::string provenance;
};

// One invariant violation, phrased with enough context to locate the datum.
struct Violation {
  std::string subject_id;  // empty for dataset-level violations
  int trial_index = -1;    // -1 when not trial-specific
  std::string message;
};

// Checks every schema invariant; returns one entry per violation. Pure.
std::vector<Violation> validate(const Dataset& ds);

// On-disk layout: <dir>/manifest.json plus per-subject raw float32 data files
// (C-order [trials][channels][samples], little-endian, no header) and CSV meta
// files. Values are narrowed to float32 on save, so save/load round-trips are
// bit-exact for datasets whose samples are float32-representable (anything
// loaded or generated by this library).
Dataset load_dataset(const std::string& dir);
void save_dataset(const Dataset& ds, const std::string& dir);

}  // namespace eegdec
