#include "corpus.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "errors.hpp"
#include "pitch.hpp"
#include "wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace f0lab {

void CorpusConfig::validate() const {
  if (n_train <= 0 || n_val <= 0 || n_test <= 0)
    throw std::invalid_argument("CorpusConfig: split counts must be positive");
  if (snr_levels.empty()) throw std::invalid_argument("CorpusConfig: no SNR levels");
  if (duration_min_s <= 0 || duration_max_s < duration_min_s)
    throw std::invalid_argument("CorpusConfig: bad duration range");
  if (contour_f0_min_hz <= 0 || contour_f0_max_hz <= contour_f0_min_hz)
    throw std::invalid_argument("CorpusConfig: bad contour f0 range");
  if (dir.empty()) throw std::invalid_argument("CorpusConfig: empty directory");
}

std::string snr_label(double snr_db) {
  char buf[32];
  if (snr_db == std::floor(snr_db) && std::abs(snr_db) < 1e6)
    std::snprintf(buf, sizeof buf, "%d", static_cast<int>(snr_db));
  else
    std::snprintf(buf, sizeof buf, "%g", snr_db);
  return buf;
}

std::vector<std::string> Dataset::all_ids() const {
  std::vector<std::string> ids = train;
  ids.insert(ids.end(), validation.begin(), validation.end());
  ids.insert(ids.end(), test.begin(), test.end());
  return ids;
}

std::string Dataset::utterance_dir(const std::string& id) const { return dir + "/" + id; }
std::string Dataset::clean_wav_path(const std::string& id) const {
  return utterance_dir(id) + "/clean.wav";
}
std::string Dataset::noisy_wav_path(const std::string& id, double snr_db) const {
  return utterance_dir(id) + "/snr_" + snr_label(snr_db) + ".wav";
}
std::string Dataset::truth_csv_path(const std::string& id) const {
  return utterance_dir(id) + "/truth_f0.csv";
}
std::string Dataset::clean_features_path(const std::string& id) const {
  return utterance_dir(id) + "/features_clean.csv";
}
std::string Dataset::noisy_features_path(const std::string& id, double snr_db) const {
  return utterance_dir(id) + "/features_snr_" + snr_label(snr_db) + ".csv";
}

void write_truth_csv(const std::string& path, const F0Track& track) {
  std::ofstream f(path);
  if (!f) throw IoError("write_truth_csv: cannot open " + path);
  f << "frame_index,f0_hz,voiced\n";
  char num[40];
  for (size_t t = 0; t < track.size(); ++t) {
    std::snprintf(num, sizeof num, "%zu,%.17g,%d\n", t, track[t].f0_hz,
                  track[t].voiced ? 1 : 0);
    f << num;
  }
  if (!f) throw IoError("write_truth_csv: short write to " + path);
}

F0Track read_truth_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("read_truth_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw IoError("read_truth_csv: empty file " + path);
  F0Track track;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string idx, f0, voiced;
    if (!std::getline(ss, idx, ',') || !std::getline(ss, f0, ',') || !std::getline(ss, voiced))
      throw IoError("read_truth_csv: malformed row in " + path);
    track.push_back({std::strtod(f0.c_str(), nullptr), voiced == "1"});
  }
  return track;
}

namespace {

std::string utterance_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "utt_%04d", index);
  return buf;
}

json feature_config_json(const FeatureConfig& fc) {
  return json{{"sample_rate", fc.sample_rate}, {"frame_ms", fc.frame_ms},
              {"hop_ms", fc.hop_ms},           {"fft_size", fc.fft_size},
              {"n_mels", fc.n_mels},           {"n_mfcc", fc.n_mfcc},
              {"f0_min_hz", fc.f0_min_hz},     {"f0_max_hz", fc.f0_max_hz},
              {"voicing_threshold", fc.voicing_threshold},
              {"energy_floor", fc.energy_floor}};
}

}  // namespace

Dataset build_dataset(const CorpusConfig& cc, const FeatureConfig& fc) {
  cc.validate();
  fc.validate();

  Dataset ds;
  ds.dir = cc.dir;
  ds.snr_levels = cc.snr_levels;
  ds.master_seed = cc.master_seed;
  ds.sample_rate = fc.sample_rate;
  ds.feature_dim = fc.feature_dim();

  fs::create_directories(cc.dir);

  const int total = cc.n_train + cc.n_val + cc.n_test;
  std::set<std::string> seen;
  for (int i = 0; i < total; ++i) {
    const std::string id = utterance_id(i);
    if (!seen.insert(id).second) throw std::invalid_argument("build_dataset: duplicate id " + id);
    if (i < cc.n_train)
      ds.train.push_back(id);
    else if (i < cc.n_train + cc.n_val)
      ds.validation.push_back(id);
    else
      ds.test.push_back(id);

    SplitMix64 spec_rng(derive_seed(cc.master_seed, id + "/spec"));
    UtteranceSpec spec = random_spec(spec_rng, cc.duration_min_s, cc.duration_max_s,
                                     cc.contour_f0_min_hz, cc.contour_f0_max_hz);
    spec.validate(cc.contour_f0_min_hz, cc.contour_f0_max_hz);

    Signal clean =
        quantize16(synthesize_utterance(spec, fc.sample_rate, derive_seed(cc.master_seed, id + "/synth")));
    F0Track truth = truth_track(spec, fc);
    if (static_cast<int>(truth.size()) != frame_count(clean.size(), fc))
      throw NumericError("build_dataset: truth track misaligned for " + id);

    fs::create_directories(ds.utterance_dir(id));
    write_wav(ds.clean_wav_path(id), clean);
    write_truth_csv(ds.truth_csv_path(id), truth);
    write_frames_csv(ds.clean_features_path(id), extract_features(clean, &truth, fc));

    for (double level : cc.snr_levels) {
      const uint64_t noise_seed =
          derive_seed(cc.master_seed, id + "/noise/snr_" + snr_label(level));
      Signal noise = white_noise(clean.size(), fc.sample_rate, noise_seed);
      Signal noisy = quantize16(mix_at_snr(clean, noise, level));
      write_wav(ds.noisy_wav_path(id, level), noisy);
      write_frames_csv(ds.noisy_features_path(id, level),
                       extract_features(noisy, nullptr, fc));
    }
  }

  json manifest;
  manifest["format"] = "f0lab-dataset";
  manifest["version"] = 1;
  manifest["master_seed"] = cc.master_seed;
  manifest["sample_rate"] = fc.sample_rate;
  manifest["feature_dim"] = ds.feature_dim;
  manifest["snr_levels"] = cc.snr_levels;
  manifest["splits"] = {{"train", ds.train}, {"validation", ds.validation}, {"test", ds.test}};
  manifest["corpus_config"] = {{"n_train", cc.n_train},
                               {"n_val", cc.n_val},
                               {"n_test", cc.n_test},
                               {"duration_min_s", cc.duration_min_s},
                               {"duration_max_s", cc.duration_max_s},
                               {"contour_f0_min_hz", cc.contour_f0_min_hz},
                               {"contour_f0_max_hz", cc.contour_f0_max_hz}};
  manifest["feature_config"] = feature_config_json(fc);
  manifest["seed_scheme"] =
      "derive_seed(master, \"<id>/spec\" | \"<id>/synth\" | \"<id>/noise/snr_<level>\")";

  std::ofstream mf(cc.dir + "/dataset.json");
  if (!mf) throw IoError("build_dataset: cannot write manifest in " + cc.dir);
  mf << manifest.dump(2) << "\n";
  if (!mf) throw IoError("build_dataset: short manifest write");
  return ds;
}

Dataset load_dataset(const std::string& dir) {
  std::ifstream mf(dir + "/dataset.json");
  if (!mf) throw IoError("load_dataset: cannot open " + dir + "/dataset.json");
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw IoError("load_dataset: malformed manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != "f0lab-dataset")
    throw IoError("load_dataset: not a dataset manifest: " + dir);

  Dataset ds;
  ds.dir = dir;
  ds.master_seed = manifest.at("master_seed").get<uint64_t>();
  ds.sample_rate = manifest.at("sample_rate").get<int>();
  ds.feature_dim = manifest.at("feature_dim").get<int>();
  ds.snr_levels = manifest.at("snr_levels").get<std::vector<double>>();
  ds.train = manifest.at("splits").at("train").get<std::vector<std::string>>();
  ds.validation = manifest.at("splits").at("validation").get<std::vector<std::string>>();
  ds.test = manifest.at("splits").at("test").get<std::vector<std::string>>();
  return ds;
}

}  // namespace f0lab
