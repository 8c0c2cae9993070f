#include "lstm.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"

namespace f0lab {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

int layer_input_dim(const ArchSpec& arch, int layer) {
  return layer == 0 ? arch.input_dim : arch.hidden[layer - 1];
}

GateBlock zero_gate(int hidden, int input) {
  GateBlock g;
  g.w_in = Matrix(hidden, input);
  g.w_rec = Matrix(hidden, hidden);
  g.bias.assign(hidden, 0.0);
  return g;
}

void collect_gate(std::vector<NamedBlock>& out, const std::string& prefix, GateBlock& g) {
  out.push_back({prefix + ".w_in", g.w_in.rows, g.w_in.cols, g.w_in.a.data()});
  out.push_back({prefix + ".w_rec", g.w_rec.rows, g.w_rec.cols, g.w_rec.a.data()});
  out.push_back({prefix + ".bias", static_cast<int>(g.bias.size()), 1, g.bias.data()});
}

}  // namespace

void ArchSpec::validate() const {
  if (input_dim < 1 || output_dim < 1)
    throw std::invalid_argument("ArchSpec: input and output widths must be >= 1");
  if (hidden.empty()) throw std::invalid_argument("ArchSpec: at least one hidden layer");
  for (int h : hidden)
    if (h < 1) throw std::invalid_argument("ArchSpec: zero-width hidden layer");
}

std::string ArchSpec::describe() const {
  std::string s = std::to_string(input_dim) + " -> [";
  for (size_t i = 0; i < hidden.size(); ++i)
    s += (i ? "," : "") + std::to_string(hidden[i]);
  s += "] -> " + std::to_string(output_dim);
  return s;
}

LstmWeights LstmWeights::zeros(const ArchSpec& arch) {
  arch.validate();
  LstmWeights w;
  w.arch = arch;
  const int n_layers = static_cast<int>(arch.hidden.size());
  w.layers.resize(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    const int h = arch.hidden[l];
    const int in = layer_input_dim(arch, l);
    w.layers[l].input_gate = zero_gate(h, in);
    w.layers[l].forget_gate = zero_gate(h, in);
    w.layers[l].output_gate = zero_gate(h, in);
    w.layers[l].candidate = zero_gate(h, in);
  }
  w.proj_w = Matrix(arch.output_dim, arch.hidden.back());
  w.proj_b.assign(arch.output_dim, 0.0);
  return w;
}

std::vector<NamedBlock> LstmWeights::named_blocks() {
  std::vector<NamedBlock> out;
  for (size_t l = 0; l < layers.size(); ++l) {
    const std::string p = "layer" + std::to_string(l);
    collect_gate(out, p + ".input_gate", layers[l].input_gate);
    collect_gate(out, p + ".forget_gate", layers[l].forget_gate);
    collect_gate(out, p + ".output_gate", layers[l].output_gate);
    collect_gate(out, p + ".candidate", layers[l].candidate);
  }
  out.push_back({"projection.w", proj_w.rows, proj_w.cols, proj_w.a.data()});
  out.push_back({"projection.bias", static_cast<int>(proj_b.size()), 1, proj_b.data()});
  return out;
}

std::vector<NamedBlock> LstmWeights::named_blocks() const {
  return const_cast<LstmWeights*>(this)->named_blocks();
}

size_t LstmWeights::parameter_count() const {
  size_t n = 0;
  for (const auto& b : named_blocks()) n += b.count();
  return n;
}

void LstmWeights::check_finite(const char* context) const {
  for (const auto& b : named_blocks())
    for (size_t i = 0; i < b.count(); ++i)
      if (!std::isfinite(b.data[i]))
        throw NumericError(std::string(context) + ": non-finite parameter in " + b.name);
}

LstmWeights init_random(const ArchSpec& arch, uint64_t seed) {
  LstmWeights w = LstmWeights::zeros(arch);
  SplitMix64 rng(seed);
  auto fill_matrix = [&rng](Matrix& m, int fan_in, int fan_out) {
    const double r = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : m.a) v = rng.uniform(-r, r);
  };
  for (size_t l = 0; l < w.layers.size(); ++l) {
    const int h = arch.hidden[l];
    const int in = layer_input_dim(arch, static_cast<int>(l));
    for (GateBlock* g : {&w.layers[l].input_gate, &w.layers[l].forget_gate,
                         &w.layers[l].output_gate, &w.layers[l].candidate}) {
      fill_matrix(g->w_in, in, h);
      fill_matrix(g->w_rec, h, h);
    }
    // forget gates open at the start so gradients flow across time
    w.layers[l].forget_gate.bias.assign(h, 1.0);
  }
  fill_matrix(w.proj_w, arch.hidden.back(), arch.output_dim);
  return w;
}

ForwardCache forward(const LstmWeights& w, const Matrix& inputs) {
  w.arch.validate();
  if (inputs.rows < 1) throw std::invalid_argument("forward: empty input sequence");
  if (inputs.cols != w.arch.input_dim)
    throw std::invalid_argument("forward: input width " + std::to_string(inputs.cols) +
                                " does not match architecture " + w.arch.describe());
  for (double v : inputs.a)
    if (!std::isfinite(v)) throw std::invalid_argument("forward: non-finite input");

  const int t_len = inputs.rows;
  const int n_layers = static_cast<int>(w.layers.size());
  ForwardCache cache;
  cache.inputs = inputs;
  cache.layers.resize(n_layers);

  Vector pre_i, pre_f, pre_o, pre_c;
  const Matrix* below = &cache.inputs;
  for (int l = 0; l < n_layers; ++l) {
    const int h = w.arch.hidden[l];
    LayerCache& lc = cache.layers[l];
    lc.gate_i = Matrix(t_len, h);
    lc.gate_f = Matrix(t_len, h);
    lc.gate_o = Matrix(t_len, h);
    lc.cand = Matrix(t_len, h);
    lc.cell = Matrix(t_len, h);
    lc.tanh_cell = Matrix(t_len, h);
    lc.hidden = Matrix(t_len, h);
    const LstmLayer& ly = w.layers[l];
    pre_i.resize(h);
    pre_f.resize(h);
    pre_o.resize(h);
    pre_c.resize(h);
    Vector h_prev(h, 0.0), c_prev(h, 0.0);
    for (int t = 0; t < t_len; ++t) {
      const double* x = below->row(t);
      for (int k = 0; k < h; ++k) {
        pre_i[k] = ly.input_gate.bias[k];
        pre_f[k] = ly.forget_gate.bias[k];
        pre_o[k] = ly.output_gate.bias[k];
        pre_c[k] = ly.candidate.bias[k];
      }
      matvec_add(ly.input_gate.w_in, x, pre_i.data());
      matvec_add(ly.forget_gate.w_in, x, pre_f.data());
      matvec_add(ly.output_gate.w_in, x, pre_o.data());
      matvec_add(ly.candidate.w_in, x, pre_c.data());
      matvec_add(ly.input_gate.w_rec, h_prev.data(), pre_i.data());
      matvec_add(ly.forget_gate.w_rec, h_prev.data(), pre_f.data());
      matvec_add(ly.output_gate.w_rec, h_prev.data(), pre_o.data());
      matvec_add(ly.candidate.w_rec, h_prev.data(), pre_c.data());
      double* gi = lc.gate_i.row(t);
      double* gf = lc.gate_f.row(t);
      double* go = lc.gate_o.row(t);
      double* gc = lc.cand.row(t);
      double* cc = lc.cell.row(t);
      double* tc = lc.tanh_cell.row(t);
      double* hh = lc.hidden.row(t);
      for (int k = 0; k < h; ++k) {
        gi[k] = sigmoid(pre_i[k]);
        gf[k] = sigmoid(pre_f[k]);
        go[k] = sigmoid(pre_o[k]);
        gc[k] = std::tanh(pre_c[k]);
        cc[k] = gf[k] * c_prev[k] + gi[k] * gc[k];
        tc[k] = std::tanh(cc[k]);
        hh[k] = go[k] * tc[k];
        h_prev[k] = hh[k];
        c_prev[k] = cc[k];
      }
    }
    below = &lc.hidden;
  }

  cache.outputs = Matrix(t_len, w.arch.output_dim);
  const Matrix& top = cache.layers.back().hidden;
  for (int t = 0; t < t_len; ++t) {
    double* y = cache.outputs.row(t);
    for (int k = 0; k < w.arch.output_dim; ++k) y[k] = w.proj_b[k];
    matvec_add(w.proj_w, top.row(t), y);
  }
  return cache;
}

double sse_loss(const Matrix& outputs, const Matrix& targets) {
  if (!outputs.same_shape(targets))
    throw std::invalid_argument("sse_loss: shape mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < outputs.a.size(); ++i) {
    const double d = outputs.a[i] - targets.a[i];
    sum += d * d;
  }
  return sum;
}

LstmWeights backward(const LstmWeights& w, const ForwardCache& cache, const Matrix& targets) {
  const int t_len = cache.steps();
  if (static_cast<int>(cache.layers.size()) != static_cast<int>(w.layers.size()) ||
      cache.inputs.cols != w.arch.input_dim)
    throw std::invalid_argument("backward: cache does not match weights");
  if (!cache.outputs.same_shape(targets))
    throw std::invalid_argument("backward: target shape mismatch");

  LstmWeights grad = LstmWeights::zeros(w.arch);
  const int n_layers = static_cast<int>(w.layers.size());

  // dL/dy and the projection gradients; d_top collects dL/dh for the top layer
  Matrix d_below(t_len, w.arch.hidden.back());
  Vector dy(w.arch.output_dim);
  const Matrix& top = cache.layers.back().hidden;
  for (int t = 0; t < t_len; ++t) {
    const double* y = cache.outputs.row(t);
    const double* tgt = targets.row(t);
    for (int k = 0; k < w.arch.output_dim; ++k) {
      dy[k] = 2.0 * (y[k] - tgt[k]);
      grad.proj_b[k] += dy[k];
    }
    outer_add(grad.proj_w, dy.data(), top.row(t));
    matvec_t_add(w.proj_w, dy.data(), d_below.row(t));
  }

  Vector dh, dc, d_pre_i, d_pre_f, d_pre_o, d_pre_c;
  for (int l = n_layers - 1; l >= 0; --l) {
    const int h = w.arch.hidden[l];
    const LstmLayer& ly = w.layers[l];
    LstmLayer& gly = grad.layers[l];
    const LayerCache& lc = cache.layers[l];
    const Matrix& x_seq = l == 0 ? cache.inputs : cache.layers[l - 1].hidden;
    const int in_dim = x_seq.cols;

    Matrix d_input(t_len, in_dim);  // gradient flowing to the layer below
    dh.assign(h, 0.0);              // recurrent dL/dh_{t}
    dc.assign(h, 0.0);              // recurrent dL/dc_{t}
    d_pre_i.resize(h);
    d_pre_f.resize(h);
    d_pre_o.resize(h);
    d_pre_c.resize(h);
    for (int t = t_len - 1; t >= 0; --t) {
      const double* gi = lc.gate_i.row(t);
      const double* gf = lc.gate_f.row(t);
      const double* go = lc.gate_o.row(t);
      const double* gc = lc.cand.row(t);
      const double* tc = lc.tanh_cell.row(t);
      const double* d_above = d_below.row(t);
      const double* c_prev_row = t > 0 ? lc.cell.row(t - 1) : nullptr;
      for (int k = 0; k < h; ++k) {
        const double dht = dh[k] + d_above[k];
        const double dct = dc[k] + dht * go[k] * (1.0 - tc[k] * tc[k]);
        const double c_prev = c_prev_row ? c_prev_row[k] : 0.0;
        d_pre_o[k] = dht * tc[k] * go[k] * (1.0 - go[k]);
        d_pre_i[k] = dct * gc[k] * gi[k] * (1.0 - gi[k]);
        d_pre_f[k] = dct * c_prev * gf[k] * (1.0 - gf[k]);
        d_pre_c[k] = dct * gi[k] * (1.0 - gc[k] * gc[k]);
        dc[k] = dct * gf[k];  // feeds dL/dc_{t-1}
      }
      const double* x = x_seq.row(t);
      outer_add(gly.input_gate.w_in, d_pre_i.data(), x);
      outer_add(gly.forget_gate.w_in, d_pre_f.data(), x);
      outer_add(gly.output_gate.w_in, d_pre_o.data(), x);
      outer_add(gly.candidate.w_in, d_pre_c.data(), x);
      if (t > 0) {
        const double* h_prev = lc.hidden.row(t - 1);
        outer_add(gly.input_gate.w_rec, d_pre_i.data(), h_prev);
        outer_add(gly.forget_gate.w_rec, d_pre_f.data(), h_prev);
        outer_add(gly.output_gate.w_rec, d_pre_o.data(), h_prev);
        outer_add(gly.candidate.w_rec, d_pre_c.data(), h_prev);
      }
      for (int k = 0; k < h; ++k) {
        gly.input_gate.bias[k] += d_pre_i[k];
        gly.forget_gate.bias[k] += d_pre_f[k];
        gly.output_gate.bias[k] += d_pre_o[k];
        gly.candidate.bias[k] += d_pre_c[k];
      }
      double* dx = d_input.row(t);
      matvec_t_add(ly.input_gate.w_in, d_pre_i.data(), dx);
      matvec_t_add(ly.forget_gate.w_in, d_pre_f.data(), dx);
      matvec_t_add(ly.output_gate.w_in, d_pre_o.data(), dx);
      matvec_t_add(ly.candidate.w_in, d_pre_c.data(), dx);
      dh.assign(h, 0.0);
      matvec_t_add(ly.input_gate.w_rec, d_pre_i.data(), dh.data());
      matvec_t_add(ly.forget_gate.w_rec, d_pre_f.data(), dh.data());
      matvec_t_add(ly.output_gate.w_rec, d_pre_o.data(), dh.data());
      matvec_t_add(ly.candidate.w_rec, d_pre_c.data(), dh.data());
    }
    d_below = std::move(d_input);
  }
  return grad;
}

LstmWeights finite_difference_gradients(const LstmWeights& w, const Matrix& inputs,
                                        const Matrix& targets, double eps) {
  LstmWeights probe = w;
  LstmWeights numeric = LstmWeights::zeros(w.arch);
  auto blocks = probe.named_blocks();
  auto grads = numeric.named_blocks();
  for (size_t b = 0; b < blocks.size(); ++b) {
    for (size_t i = 0; i < blocks[b].count(); ++i) {
      double& p = blocks[b].data[i];
      const double saved = p;
      p = saved + eps;
      const double up = sse_loss(forward(probe, inputs).outputs, targets);
      p = saved - eps;
      const double down = sse_loss(forward(probe, inputs).outputs, targets);
      p = saved;
      grads[b].data[i] = (up - down) / (2.0 * eps);
    }
  }
  return numeric;
}

double max_relative_error(const LstmWeights& a, const LstmWeights& b) {
  auto ba = a.named_blocks();
  auto bb = b.named_blocks();
  if (ba.size() != bb.size()) throw std::invalid_argument("max_relative_error: shape mismatch");
  double worst = 0.0;
  for (size_t k = 0; k < ba.size(); ++k) {
    if (ba[k].count() != bb[k].count())
      throw std::invalid_argument("max_relative_error: block mismatch at " + ba[k].name);
    for (size_t i = 0; i < ba[k].count(); ++i) {
      const double x = ba[k].data[i], y = bb[k].data[i];
      const double err = std::abs(x - y) / std::max(std::abs(x) + std::abs(y), 1e-8);
      worst = std::max(worst, err);
    }
  }
  return worst;
}

double check_gradients(const ArchSpec& arch, uint64_t seed) {
  arch.validate();
  const int t_len = 5;
  LstmWeights w = init_random(arch, seed);
  SplitMix64 rng(seed ^ 0x5eed5eedULL);
  Matrix inputs(t_len, arch.input_dim), targets(t_len, arch.output_dim);
  for (double& v : inputs.a) v = rng.uniform(-1.0, 1.0);
  for (double& v : targets.a) v = rng.uniform(-1.0, 1.0);
  ForwardCache cache = forward(w, inputs);
  LstmWeights analytic = backward(w, cache, targets);
  LstmWeights numeric = finite_difference_gradients(w, inputs, targets, 1e-5);
  return max_relative_error(analytic, numeric);
}

}  // namespace f0lab
