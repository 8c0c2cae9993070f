#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace f0lab {

// Network dimensions: input width, one hidden size per stacked layer, and
// the width of the linear output projection.
struct ArchSpec {
  int input_dim = 0;
  std::vector<int> hidden = {64, 64};
  int output_dim = 0;

  void validate() const;
  bool operator==(const ArchSpec&) const = default;
  std::string describe() const;
};

// Parameters of one gate: input-to-hidden matrix, recurrent matrix, bias.
struct GateBlock {
  Matrix w_in;
  Matrix w_rec;
  Vector bias;
};

struct LstmLayer {
  GateBlock input_gate;
  GateBlock forget_gate;
  GateBlock output_gate;
  GateBlock candidate;
};

// A named view into one parameter block, used by serialization and the
// gradient checker.
struct NamedBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  double* data = nullptr;
  size_t count() const { return static_cast<size_t>(rows) * cols; }
};

// All trainable parameters of the stacked LSTM plus the output projection.
// The same structure doubles as the gradient container.
struct LstmWeights {
  ArchSpec arch;
  std::vector<LstmLayer> layers;
  Matrix proj_w;
  Vector proj_b;

  static LstmWeights zeros(const ArchSpec& arch);
  std::vector<NamedBlock> named_blocks();
  std::vector<NamedBlock> named_blocks() const;  // views remain mutable-free by convention
  size_t parameter_count() const;
  void check_finite(const char* context) const;
};

// Glorot-uniform matrices (r = sqrt(6/(fan_in+fan_out))), forget-gate biases
// at 1.0, all other biases zero. Deterministic for a given seed.
LstmWeights init_random(const ArchSpec& arch, uint64_t seed);

// Per-layer activations for one sequence; everything backward needs.
struct LayerCache {
  Matrix gate_i, gate_f, gate_o, cand;  // T x H, post-nonlinearity
  Matrix cell, tanh_cell, hidden;       // T x H
};

struct ForwardCache {
  Matrix inputs;  // T x input_dim, the sequence forward consumed
  std::vector<LayerCache> layers;
  Matrix outputs;  // T x output_dim
  int steps() const { return inputs.rows; }
};

// Standard LSTM recurrences (sigmoid gates, tanh candidate/cell output) with
// zero initial state, followed by the linear projection. Read-only on w.
ForwardCache forward(const LstmWeights& w, const Matrix& inputs);

// Sum of squared differences over all timesteps and components.
double sse_loss(const Matrix& outputs, const Matrix& targets);

// Exact gradients of sse_loss(forward(w, cache.inputs).outputs, targets)
// with respect to every parameter, by reverse-time accumulation.
LstmWeights backward(const LstmWeights& w, const ForwardCache& cache, const Matrix& targets);

// Central finite differences of the same loss; the independent check for
// backward. eps is the half step.
LstmWeights finite_difference_gradients(const LstmWeights& w, const Matrix& inputs,
                                        const Matrix& targets, double eps);

// Max over parameters of |a - b| / max(|a| + |b|, 1e-8).
double max_relative_error(const LstmWeights& a, const LstmWeights& b);

// Builds random weights and data (T = 5) and compares backward against
// central finite differences; returns the max relative error.
double check_gradients(const ArchSpec& arch, uint64_t seed);

}  // namespace f0lab
