#include "train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"

namespace f0lab {

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw std::invalid_argument("TrainConfig: learning rate must be > 0");
  if (!(clip_norm > 0)) throw std::invalid_argument("TrainConfig: clip_norm must be > 0");
  if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
  if (max_epochs < 1) throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
}

const char* to_string(StopReason r) {
  return r == StopReason::patience_exhausted ? "patience_exhausted" : "max_epochs";
}

FeatureStats FeatureStats::compute(std::span<const Matrix> sequences) {
  if (sequences.empty()) throw std::invalid_argument("FeatureStats: no sequences");
  const int dim = sequences.front().cols;
  Vector sum(dim, 0.0), sum_sq(dim, 0.0);
  size_t n = 0;
  for (const Matrix& m : sequences) {
    if (m.cols != dim) throw std::invalid_argument("FeatureStats: inconsistent widths");
    for (int t = 0; t < m.rows; ++t) {
      const double* r = m.row(t);
      for (int c = 0; c < dim; ++c) {
        sum[c] += r[c];
        sum_sq[c] += r[c] * r[c];
      }
    }
    n += static_cast<size_t>(m.rows);
  }
  if (n == 0) throw std::invalid_argument("FeatureStats: no frames");
  FeatureStats st;
  st.mean.resize(dim);
  st.stddev.resize(dim);
  for (int c = 0; c < dim; ++c) {
    st.mean[c] = sum[c] / static_cast<double>(n);
    const double var = std::max(0.0, sum_sq[c] / static_cast<double>(n) - st.mean[c] * st.mean[c]);
    st.stddev[c] = std::max(std::sqrt(var), 1e-8);  // constant features standardize to 0
  }
  return st;
}

Matrix FeatureStats::apply(const Matrix& raw) const {
  if (raw.cols != static_cast<int>(mean.size()))
    throw std::invalid_argument("FeatureStats: width mismatch");
  Matrix out(raw.rows, raw.cols);
  for (int t = 0; t < raw.rows; ++t) {
    const double* r = raw.row(t);
    double* o = out.row(t);
    for (int c = 0; c < raw.cols; ++c) o[c] = (r[c] - mean[c]) / stddev[c];
  }
  return out;
}

double clip_gradients(LstmWeights& grads, double clip_norm) {
  double sq = 0.0;
  auto blocks = grads.named_blocks();
  for (const auto& b : blocks)
    for (size_t i = 0; i < b.count(); ++i) sq += b.data[i] * b.data[i];
  const double norm = std::sqrt(sq);
  if (norm > clip_norm && norm > 0.0) {
    const double scale = clip_norm / norm;
    for (const auto& b : blocks)
      for (size_t i = 0; i < b.count(); ++i) b.data[i] *= scale;
  }
  return norm;
}

void apply_update(LstmWeights& w, const LstmWeights& grads, double lr) {
  auto wb = w.named_blocks();
  auto gb = grads.named_blocks();
  for (size_t k = 0; k < wb.size(); ++k)
    for (size_t i = 0; i < wb[k].count(); ++i) wb[k].data[i] -= lr * gb[k].data[i];
}

double evaluate_sse(const LstmWeights& w, const FeatureStats& stats,
                    std::span<const SequencePair> pairs) {
  double total = 0.0;
  for (const SequencePair& p : pairs)
    total += sse_loss(forward(w, stats.apply(p.input)).outputs, p.target);
  return total;
}

double parameter_distance(const LstmWeights& a, const LstmWeights& b) {
  auto ba = a.named_blocks();
  auto bb = b.named_blocks();
  if (ba.size() != bb.size()) throw std::invalid_argument("parameter_distance: shape mismatch");
  double sq = 0.0;
  for (size_t k = 0; k < ba.size(); ++k) {
    if (ba[k].count() != bb[k].count())
      throw std::invalid_argument("parameter_distance: block mismatch");
    for (size_t i = 0; i < ba[k].count(); ++i) {
      const double d = ba[k].data[i] - bb[k].data[i];
      sq += d * d;
    }
  }
  return std::sqrt(sq);
}

TrainResult train(const LstmWeights& init, std::span<const SequencePair> train_set,
                  std::span<const SequencePair> val_set, const TrainConfig& cfg) {
  cfg.validate();
  init.arch.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (val_set.empty()) throw std::invalid_argument("train: empty validation set");
  for (const auto& p : train_set)
    if (p.input.rows != p.target.rows || p.input.cols != init.arch.input_dim ||
        p.target.cols != init.arch.output_dim)
      throw std::invalid_argument("train: sequence dimensions do not match architecture");

  std::vector<Matrix> stat_src;
  stat_src.reserve(train_set.size() * 2);
  for (const auto& p : train_set) {
    stat_src.push_back(p.input);
    stat_src.push_back(p.target);
  }
  TrainResult result;
  result.stats = FeatureStats::compute(stat_src);
  stat_src.clear();

  // standardize training inputs once; validation is standardized on the fly
  std::vector<Matrix> train_inputs;
  train_inputs.reserve(train_set.size());
  for (const auto& p : train_set) train_inputs.push_back(result.stats.apply(p.input));

  LstmWeights w = init;
  LstmWeights best = init;
  EarlyStopping stopper{cfg.patience};
  SplitMix64 shuffle_rng(derive_seed(cfg.seed, "train/shuffle"));
  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  TrainRecord& rec = result.record;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const double val = evaluate_sse(w, result.stats, val_set);
    if (!std::isfinite(val))
      throw NumericError("train: validation sse diverged at epoch " + std::to_string(epoch));
    rec.epochs.push_back({epoch, std::numeric_limits<double>::quiet_NaN(), val});
    if (stopper.observe(epoch, val)) best = w;
    if (cfg.verbose)
      std::fprintf(stderr, "epoch %d val_sse %.6f best %.6f (epoch %d)\n", epoch, val,
                   stopper.best, stopper.best_epoch);
    if (stopper.stop()) {
      rec.stop_reason = StopReason::patience_exhausted;
      break;
    }
    if (epoch == cfg.max_epochs) {
      rec.stop_reason = StopReason::max_epochs;
      break;
    }

    // Fisher-Yates with the seeded stream
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    double train_sse = 0.0;
    for (size_t idx : order) {
      const Matrix& x = train_inputs[idx];
      const Matrix& tgt = train_set[idx].target;
      ForwardCache cache = forward(w, x);
      const double loss = sse_loss(cache.outputs, tgt);
      if (!std::isfinite(loss))
        throw NumericError("train: loss diverged at epoch " + std::to_string(epoch));
      train_sse += loss;
      LstmWeights grads = backward(w, cache, tgt);
      clip_gradients(grads, cfg.clip_norm);
      apply_update(w, grads, cfg.learning_rate);
    }
    rec.epochs.back().train_sse = train_sse;
  }

  rec.best_epoch = stopper.best_epoch;
  rec.best_validation_sse = stopper.best;
  result.weights = std::move(best);
  return result;
}

void write_record_csv(const std::string& path, const TrainRecord& rec) {
  std::ofstream f(path);
  if (!f) throw IoError("write_record_csv: cannot open " + path);
  f << "epoch,train_sse,val_sse\n";
  char num[64];
  for (const EpochStat& e : rec.epochs) {
    f << e.epoch << ",";
    if (std::isfinite(e.train_sse)) {
      std::snprintf(num, sizeof num, "%.17g", e.train_sse);
      f << num;
    }
    std::snprintf(num, sizeof num, ",%.17g\n", e.val_sse);
    f << num;
  }
  if (!f) throw IoError("write_record_csv: short write to " + path);
}

TrainRecord read_record_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("read_record_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("epoch,", 0) != 0)
    throw IoError("read_record_csv: bad header in " + path);
  TrainRecord rec;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string epoch, train, val;
    if (!std::getline(ss, epoch, ',') || !std::getline(ss, train, ',') || !std::getline(ss, val))
      throw IoError("read_record_csv: malformed row in " + path);
    EpochStat e;
    e.epoch = std::atoi(epoch.c_str());
    e.train_sse = train.empty() ? std::numeric_limits<double>::quiet_NaN()
                                : std::strtod(train.c_str(), nullptr);
    e.val_sse = std::strtod(val.c_str(), nullptr);
    rec.epochs.push_back(e);
    if (e.val_sse < rec.best_validation_sse) {
      rec.best_validation_sse = e.val_sse;
      rec.best_epoch = e.epoch;
    }
  }
  return rec;
}

}  // namespace f0lab
