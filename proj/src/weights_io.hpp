#pragma once

#include <string>

#include "lstm.hpp"
#include "train.hpp"

namespace f0lab {

// A trained (or initial) network together with the input standardization it
// was trained under and the initialization it started from.
struct Model {
  LstmWeights weights;
  FeatureStats stats;
  std::string init_kind;  // "random" | "auto_associative"
};

// Versioned binary model file (magic "F0LW", format 1): header with init
// kind, architecture and standardization stats, then named parameter blocks
// with explicit shapes as little-endian 64-bit floats.
void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace f0lab
