#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lstm.hpp"
#include "matrix.hpp"

namespace f0lab {

struct TrainConfig {
  double learning_rate = 1e-3;
  double clip_norm = 5.0;  // global gradient-norm clip
  int patience = 40;
  int max_epochs = 1000;
  uint64_t seed = 0;
  bool verbose = false;

  void validate() const;
};

enum class StopReason { patience_exhausted, max_epochs };

const char* to_string(StopReason r);

struct EpochStat {
  int epoch = 0;
  double train_sse = std::numeric_limits<double>::quiet_NaN();  // NaN: no update pass ran
  double val_sse = 0.0;
};

struct TrainRecord {
  std::vector<EpochStat> epochs;
  int best_epoch = 0;
  double best_validation_sse = std::numeric_limits<double>::infinity();
  StopReason stop_reason = StopReason::max_epochs;
};

// Patience bookkeeping shared by the training loop and its tests. Feed one
// validation value per epoch; stop() turns true once `patience` epochs pass
// without a strict improvement.
struct EarlyStopping {
  int patience = 40;
  int best_epoch = 0;
  double best = std::numeric_limits<double>::infinity();
  int epochs_since_best = 0;

  // Returns true when this epoch improved on the best value.
  bool observe(int epoch, double val) {
    if (val < best) {
      best = val;
      best_epoch = epoch;
      epochs_since_best = 0;
      return true;
    }
    ++epochs_since_best;
    return false;
  }
  bool stop() const { return epochs_since_best >= patience; }
};

// Per-component standardization. Applied to network inputs only; targets
// stay in raw units so sse is comparable across systems.
struct FeatureStats {
  Vector mean;
  Vector stddev;

  static FeatureStats compute(std::span<const Matrix> sequences);
  Matrix apply(const Matrix& raw) const;
};

// One training example: raw (unstandardized) input and target sequences.
struct SequencePair {
  Matrix input;
  Matrix target;
};

struct TrainResult {
  LstmWeights weights;  // best-validation snapshot
  TrainRecord record;
  FeatureStats stats;
};

// Early-stopped gradient descent over whole utterances. Each epoch first
// evaluates validation sse with the current weights (so epoch 1 reports the
// initial weights), snapshots on improvement, then runs one shuffled pass of
// per-utterance forward/backward/clip/update. The epoch that exhausts
// patience or hits max_epochs records validation only.
TrainResult train(const LstmWeights& init, std::span<const SequencePair> train_set,
                  std::span<const SequencePair> val_set, const TrainConfig& cfg);

// Scales grads so the global L2 norm is at most clip_norm; returns the
// pre-clip norm.
double clip_gradients(LstmWeights& grads, double clip_norm);

// In-place w -= lr * g.
void apply_update(LstmWeights& w, const LstmWeights& grads, double lr);

// Aggregate sse of a model over raw pairs, inputs standardized with stats.
double evaluate_sse(const LstmWeights& w, const FeatureStats& stats,
                    std::span<const SequencePair> pairs);

// L2 distance between two congruent parameter sets.
double parameter_distance(const LstmWeights& a, const LstmWeights& b);

// CSV `epoch,train_sse,val_sse`; train_sse cell empty where no pass ran.
void write_record_csv(const std::string& path, const TrainRecord& rec);
TrainRecord read_record_csv(const std::string& path);

}  // namespace f0lab
