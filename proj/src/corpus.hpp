#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "features.hpp"
#include "signal.hpp"
#include "synth.hpp"
#include "track.hpp"

namespace f0lab {

struct CorpusConfig {
  int n_train = 80;
  int n_val = 15;
  int n_test = 10;
  std::vector<double> snr_levels = {-10, -5, 0, 5, 10};
  uint64_t master_seed = 1;
  double duration_min_s = 2.0;
  double duration_max_s = 4.0;
  double contour_f0_min_hz = 100.0;
  double contour_f0_max_hz = 300.0;
  std::string dir = "corpus";

  void validate() const;
};

// On-disk dataset handle. Per utterance <id> the directory holds clean.wav,
// truth_f0.csv, snr_<level>.wav, features_clean.csv and
// features_snr_<level>.csv; dataset.json records splits, seeds and config.
struct Dataset {
  std::string dir;
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  std::vector<double> snr_levels;
  uint64_t master_seed = 0;
  int sample_rate = 16000;
  int feature_dim = 15;

  std::vector<std::string> all_ids() const;
  std::string utterance_dir(const std::string& id) const;
  std::string clean_wav_path(const std::string& id) const;
  std::string noisy_wav_path(const std::string& id, double snr_db) const;
  std::string truth_csv_path(const std::string& id) const;
  std::string clean_features_path(const std::string& id) const;
  std::string noisy_features_path(const std::string& id, double snr_db) const;
};

// Stable text form of an SNR level for filenames and CSV cells: integral
// levels print without a decimal point ("-5", "0", "10").
std::string snr_label(double snr_db);

// Synthesizes the corpus, mixes fresh seeded white noise per (utterance,
// level), extracts clean and noisy features, persists everything and writes
// dataset.json. A pure function of (corpus config, feature config).
Dataset build_dataset(const CorpusConfig& cc, const FeatureConfig& fc);

Dataset load_dataset(const std::string& dir);

void write_truth_csv(const std::string& path, const F0Track& track);
F0Track read_truth_csv(const std::string& path);

}  // namespace f0lab
