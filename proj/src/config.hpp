#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "features.hpp"
#include "lstm.hpp"
#include "metrics.hpp"
#include "train.hpp"

namespace f0lab {

// Everything a run needs, addressable by string key for the C API and the
// config-file loader. Defaults are the desk-scale experiment.
struct ExperimentConfig {
  std::string out_dir = "out";
  uint64_t master_seed = 42;

  // corpus
  int n_train = 80;
  int n_val = 15;
  int n_test = 10;
  std::vector<double> snr_levels = {-10, -5, 0, 5, 10};
  double duration_min_s = 2.0;
  double duration_max_s = 4.0;
  double contour_f0_min_hz = 100.0;
  double contour_f0_max_hz = 300.0;

  FeatureConfig features;

  // network and optimization
  std::vector<int> hidden = {64, 64};
  double learning_rate = 1e-3;
  double clip_norm = 5.0;
  int patience = 40;
  int max_epochs = 1000;
  double pretrain_learning_rate = 1e-3;
  double pretrain_clip_norm = 5.0;
  int pretrain_patience = 40;
  int pretrain_max_epochs = 1000;

  // evaluation and orchestration
  std::vector<std::string> systems = {"None", "LSTM", "LSTM-AA"};
  double decode_threshold_log_f0 = kDefaultDecodeThresholdLog;
  std::string train_mode = "matched";  // "matched" | "pooled"
  int threads = 0;                     // 0 = one worker per core, capped by cell count
  bool verbose = false;

  // Known keys in canonical order.
  static const std::vector<std::string>& keys();
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  // `key = value` lines; '#' starts a comment. Unknown keys are errors.
  void load_file(const std::string& path);
  // One `key = value` line per known key, canonical order.
  std::string canonical() const;

  CorpusConfig corpus_config() const;
  TrainConfig train_config() const;
  TrainConfig pretrain_config() const;
  ArchSpec arch() const;

  void validate() const;
};

}  // namespace f0lab
