#pragma once

#include <span>

#include "train.hpp"

namespace f0lab {

// Supervised auto-associative pretraining: the network is trained with the
// same clean feature sequence at input and target, learning the identity
// map. The resulting weights seed the denoising networks.
TrainResult pretrain_autoassociative(const ArchSpec& arch, std::span<const Matrix> clean_train,
                                     std::span<const Matrix> clean_val, const TrainConfig& cfg);

// Deep copy of the pretrained weights for use as a training start point;
// every parameter stays trainable. Rejects an architecture mismatch with
// the detection network.
LstmWeights transfer_weights(const LstmWeights& theta_a, const ArchSpec& detection_arch);

}  // namespace f0lab
