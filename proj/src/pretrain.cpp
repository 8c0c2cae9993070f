#include "pretrain.hpp"

#include <stdexcept>

#include "rng.hpp"

namespace f0lab {

TrainResult pretrain_autoassociative(const ArchSpec& arch, std::span<const Matrix> clean_train,
                                     std::span<const Matrix> clean_val, const TrainConfig& cfg) {
  arch.validate();
  if (arch.input_dim != arch.output_dim)
    throw std::invalid_argument(
        "pretrain_autoassociative: identity mapping needs input width == output width");

  auto make_pairs = [](std::span<const Matrix> seqs) {
    std::vector<SequencePair> pairs;
    pairs.reserve(seqs.size());
    for (const Matrix& m : seqs) pairs.push_back({m, m});
    return pairs;
  };
  const std::vector<SequencePair> train_pairs = make_pairs(clean_train);
  const std::vector<SequencePair> val_pairs = make_pairs(clean_val);

  LstmWeights theta_r = init_random(arch, derive_seed(cfg.seed, "pretrain/init"));
  return train(theta_r, train_pairs, val_pairs, cfg);
}

LstmWeights transfer_weights(const LstmWeights& theta_a, const ArchSpec& detection_arch) {
  if (!(theta_a.arch == detection_arch))
    throw std::invalid_argument("transfer_weights: architecture mismatch (" +
                                theta_a.arch.describe() + " vs " + detection_arch.describe() +
                                ")");
  return theta_a;  // value copy; the caller owns an isolated set
}

}  // namespace f0lab
