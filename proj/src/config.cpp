#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"

namespace f0lab {

namespace {

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
  return x;
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad seed for " + key + ": '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // trim spaces
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_double(v[i]);
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join_strings(const std::vector<std::string>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

struct KeyHandler {
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<KeyHandler>& handlers() {
  using C = ExperimentConfig;
  static const std::vector<KeyHandler> table = {
      {"out_dir", [](C& c, const std::string& v) { c.out_dir = v; },
       [](const C& c) { return c.out_dir; }},
      {"master_seed", [](C& c, const std::string& v) { c.master_seed = parse_u64("master_seed", v); },
       [](const C& c) { return std::to_string(c.master_seed); }},
      {"n_train", [](C& c, const std::string& v) { c.n_train = static_cast<int>(parse_int("n_train", v)); },
       [](const C& c) { return std::to_string(c.n_train); }},
      {"n_val", [](C& c, const std::string& v) { c.n_val = static_cast<int>(parse_int("n_val", v)); },
       [](const C& c) { return std::to_string(c.n_val); }},
      {"n_test", [](C& c, const std::string& v) { c.n_test = static_cast<int>(parse_int("n_test", v)); },
       [](const C& c) { return std::to_string(c.n_test); }},
      {"snr_levels",
       [](C& c, const std::string& v) {
         c.snr_levels.clear();
         for (const auto& s : split_list(v)) c.snr_levels.push_back(parse_double("snr_levels", s));
       },
       [](const C& c) { return join_doubles(c.snr_levels); }},
      {"duration_min_s", [](C& c, const std::string& v) { c.duration_min_s = parse_double("duration_min_s", v); },
       [](const C& c) { return fmt_double(c.duration_min_s); }},
      {"duration_max_s", [](C& c, const std::string& v) { c.duration_max_s = parse_double("duration_max_s", v); },
       [](const C& c) { return fmt_double(c.duration_max_s); }},
      {"contour_f0_min_hz", [](C& c, const std::string& v) { c.contour_f0_min_hz = parse_double("contour_f0_min_hz", v); },
       [](const C& c) { return fmt_double(c.contour_f0_min_hz); }},
      {"contour_f0_max_hz", [](C& c, const std::string& v) { c.contour_f0_max_hz = parse_double("contour_f0_max_hz", v); },
       [](const C& c) { return fmt_double(c.contour_f0_max_hz); }},
      {"sample_rate", [](C& c, const std::string& v) { c.features.sample_rate = static_cast<int>(parse_int("sample_rate", v)); },
       [](const C& c) { return std::to_string(c.features.sample_rate); }},
      {"frame_ms", [](C& c, const std::string& v) { c.features.frame_ms = parse_double("frame_ms", v); },
       [](const C& c) { return fmt_double(c.features.frame_ms); }},
      {"hop_ms", [](C& c, const std::string& v) { c.features.hop_ms = parse_double("hop_ms", v); },
       [](const C& c) { return fmt_double(c.features.hop_ms); }},
      {"fft_size", [](C& c, const std::string& v) { c.features.fft_size = static_cast<int>(parse_int("fft_size", v)); },
       [](const C& c) { return std::to_string(c.features.fft_size); }},
      {"n_mels", [](C& c, const std::string& v) { c.features.n_mels = static_cast<int>(parse_int("n_mels", v)); },
       [](const C& c) { return std::to_string(c.features.n_mels); }},
      {"n_mfcc", [](C& c, const std::string& v) { c.features.n_mfcc = static_cast<int>(parse_int("n_mfcc", v)); },
       [](const C& c) { return std::to_string(c.features.n_mfcc); }},
      {"f0_min_hz", [](C& c, const std::string& v) { c.features.f0_min_hz = parse_double("f0_min_hz", v); },
       [](const C& c) { return fmt_double(c.features.f0_min_hz); }},
      {"f0_max_hz", [](C& c, const std::string& v) { c.features.f0_max_hz = parse_double("f0_max_hz", v); },
       [](const C& c) { return fmt_double(c.features.f0_max_hz); }},
      {"voicing_threshold", [](C& c, const std::string& v) { c.features.voicing_threshold = parse_double("voicing_threshold", v); },
       [](const C& c) { return fmt_double(c.features.voicing_threshold); }},
      {"energy_floor", [](C& c, const std::string& v) { c.features.energy_floor = parse_double("energy_floor", v); },
       [](const C& c) { return fmt_double(c.features.energy_floor); }},
      {"hidden_sizes",
       [](C& c, const std::string& v) {
         c.hidden.clear();
         for (const auto& s : split_list(v))
           c.hidden.push_back(static_cast<int>(parse_int("hidden_sizes", s)));
       },
       [](const C& c) { return join_ints(c.hidden); }},
      {"learning_rate", [](C& c, const std::string& v) { c.learning_rate = parse_double("learning_rate", v); },
       [](const C& c) { return fmt_double(c.learning_rate); }},
      {"clip_norm", [](C& c, const std::string& v) { c.clip_norm = parse_double("clip_norm", v); },
       [](const C& c) { return fmt_double(c.clip_norm); }},
      {"patience", [](C& c, const std::string& v) { c.patience = static_cast<int>(parse_int("patience", v)); },
       [](const C& c) { return std::to_string(c.patience); }},
      {"max_epochs", [](C& c, const std::string& v) { c.max_epochs = static_cast<int>(parse_int("max_epochs", v)); },
       [](const C& c) { return std::to_string(c.max_epochs); }},
      {"pretrain_learning_rate", [](C& c, const std::string& v) { c.pretrain_learning_rate = parse_double("pretrain_learning_rate", v); },
       [](const C& c) { return fmt_double(c.pretrain_learning_rate); }},
      {"pretrain_clip_norm", [](C& c, const std::string& v) { c.pretrain_clip_norm = parse_double("pretrain_clip_norm", v); },
       [](const C& c) { return fmt_double(c.pretrain_clip_norm); }},
      {"pretrain_patience", [](C& c, const std::string& v) { c.pretrain_patience = static_cast<int>(parse_int("pretrain_patience", v)); },
       [](const C& c) { return std::to_string(c.pretrain_patience); }},
      {"pretrain_max_epochs", [](C& c, const std::string& v) { c.pretrain_max_epochs = static_cast<int>(parse_int("pretrain_max_epochs", v)); },
       [](const C& c) { return std::to_string(c.pretrain_max_epochs); }},
      {"systems",
       [](C& c, const std::string& v) { c.systems = split_list(v); },
       [](const C& c) { return join_strings(c.systems); }},
      {"decode_threshold_log_f0", [](C& c, const std::string& v) { c.decode_threshold_log_f0 = parse_double("decode_threshold_log_f0", v); },
       [](const C& c) { return fmt_double(c.decode_threshold_log_f0); }},
      {"train_mode", [](C& c, const std::string& v) { c.train_mode = v; },
       [](const C& c) { return c.train_mode; }},
      {"threads", [](C& c, const std::string& v) { c.threads = static_cast<int>(parse_int("threads", v)); },
       [](const C& c) { return std::to_string(c.threads); }},
      {"verbose", [](C& c, const std::string& v) { c.verbose = parse_bool("verbose", v); },
       [](const C& c) { return c.verbose ? "true" : "false"; }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& h : handlers()) v.push_back(h.name);
    return v;
  }();
  return names;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  for (const auto& h : handlers()) {
    if (h.name == key) {
      h.set(*this, value);
      return;
    }
  }
  throw std::invalid_argument("config: unknown key '" + key + "'");
}

std::string ExperimentConfig::get(const std::string& key) const {
  for (const auto& h : handlers())
    if (h.name == key) return h.get(*this);
  throw std::invalid_argument("config: unknown key '" + key + "'");
}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("config: cannot open " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("config: missing '=' at " + path + ":" + std::to_string(lineno));
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t\r");
      const auto y = s.find_last_not_of(" \t\r");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    set(key, value);
  }
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  for (const auto& h : handlers()) out += h.name + " = " + h.get(*this) + "\n";
  return out;
}

CorpusConfig ExperimentConfig::corpus_config() const {
  CorpusConfig cc;
  cc.n_train = n_train;
  cc.n_val = n_val;
  cc.n_test = n_test;
  cc.snr_levels = snr_levels;
  cc.master_seed = master_seed;
  cc.duration_min_s = duration_min_s;
  cc.duration_max_s = duration_max_s;
  cc.contour_f0_min_hz = contour_f0_min_hz;
  cc.contour_f0_max_hz = contour_f0_max_hz;
  cc.dir = out_dir + "/corpus";
  return cc;
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig tc;
  tc.learning_rate = learning_rate;
  tc.clip_norm = clip_norm;
  tc.patience = patience;
  tc.max_epochs = max_epochs;
  tc.verbose = verbose;
  return tc;
}

TrainConfig ExperimentConfig::pretrain_config() const {
  TrainConfig tc;
  tc.learning_rate = pretrain_learning_rate;
  tc.clip_norm = pretrain_clip_norm;
  tc.patience = pretrain_patience;
  tc.max_epochs = pretrain_max_epochs;
  tc.verbose = verbose;
  return tc;
}

ArchSpec ExperimentConfig::arch() const {
  ArchSpec a;
  a.input_dim = features.feature_dim();
  a.hidden = hidden;
  a.output_dim = features.feature_dim();
  return a;
}

void ExperimentConfig::validate() const {
  corpus_config().validate();
  features.validate();
  arch().validate();
  train_config().validate();
  pretrain_config().validate();
  if (train_mode != "matched" && train_mode != "pooled")
    throw std::invalid_argument("config: train_mode must be 'matched' or 'pooled'");
  if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
  if (systems.empty()) throw std::invalid_argument("config: no systems requested");
  for (const auto& s : systems)
    if (s != "None" && s != "LSTM" && s != "LSTM-AA")
      throw std::invalid_argument("config: unknown system '" + s + "'");
}

}  // namespace f0lab
