#include "weights_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; big-endian hosts need byte swaps");

namespace f0lab {
namespace {

constexpr char kMagic[4] = {'F', '0', 'L', 'W'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ofstream& f, uint32_t v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_string(std::ofstream& f, const std::string& s) {
  put_u32(f, static_cast<uint32_t>(s.size()));
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_doubles(std::ofstream& f, const double* p, size_t n) {
  f.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

uint32_t get_u32(std::ifstream& f, const std::string& path) {
  uint32_t v = 0;
  if (!f.read(reinterpret_cast<char*>(&v), sizeof v))
    throw IoError("load_model: truncated file " + path);
  return v;
}

std::string get_string(std::ifstream& f, const std::string& path) {
  const uint32_t n = get_u32(f, path);
  if (n > (1u << 20)) throw IoError("load_model: implausible string length in " + path);
  std::string s(n, '\0');
  if (!f.read(s.data(), n)) throw IoError("load_model: truncated file " + path);
  return s;
}

void get_doubles(std::ifstream& f, double* p, size_t n, const std::string& path) {
  if (!f.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double))))
    throw IoError("load_model: truncated file " + path);
}

}  // namespace

void save_model(const std::string& path, const Model& model) {
  model.weights.arch.validate();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("save_model: cannot open " + path);

  f.write(kMagic, 4);
  put_u32(f, kVersion);
  put_string(f, model.init_kind);
  const ArchSpec& arch = model.weights.arch;
  put_u32(f, static_cast<uint32_t>(arch.input_dim));
  put_u32(f, static_cast<uint32_t>(arch.hidden.size()));
  for (int h : arch.hidden) put_u32(f, static_cast<uint32_t>(h));
  put_u32(f, static_cast<uint32_t>(arch.output_dim));
  put_u32(f, static_cast<uint32_t>(model.stats.mean.size()));
  put_doubles(f, model.stats.mean.data(), model.stats.mean.size());
  put_doubles(f, model.stats.stddev.data(), model.stats.stddev.size());

  const auto blocks = model.weights.named_blocks();
  put_u32(f, static_cast<uint32_t>(blocks.size()));
  for (const NamedBlock& b : blocks) {
    put_string(f, b.name);
    put_u32(f, static_cast<uint32_t>(b.rows));
    put_u32(f, static_cast<uint32_t>(b.cols));
    put_doubles(f, b.data, b.count());
  }
  if (!f) throw IoError("save_model: short write to " + path);
}

Model load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("load_model: cannot open " + path);

  char magic[4];
  if (!f.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("load_model: bad magic in " + path);
  const uint32_t version = get_u32(f, path);
  if (version != kVersion)
    throw IoError("load_model: unsupported format version " + std::to_string(version) + " in " +
                  path);

  Model model;
  model.init_kind = get_string(f, path);
  ArchSpec arch;
  arch.input_dim = static_cast<int>(get_u32(f, path));
  const uint32_t n_layers = get_u32(f, path);
  if (n_layers == 0 || n_layers > 64) throw IoError("load_model: implausible layer count");
  arch.hidden.resize(n_layers);
  for (uint32_t i = 0; i < n_layers; ++i) arch.hidden[i] = static_cast<int>(get_u32(f, path));
  arch.output_dim = static_cast<int>(get_u32(f, path));
  arch.validate();

  const uint32_t stat_dim = get_u32(f, path);
  model.stats.mean.resize(stat_dim);
  model.stats.stddev.resize(stat_dim);
  get_doubles(f, model.stats.mean.data(), stat_dim, path);
  get_doubles(f, model.stats.stddev.data(), stat_dim, path);

  model.weights = LstmWeights::zeros(arch);
  auto blocks = model.weights.named_blocks();
  const uint32_t n_blocks = get_u32(f, path);
  if (n_blocks != blocks.size())
    throw IoError("load_model: block count mismatch in " + path);
  for (NamedBlock& b : blocks) {
    const std::string name = get_string(f, path);
    const uint32_t rows = get_u32(f, path);
    const uint32_t cols = get_u32(f, path);
    if (name != b.name || rows != static_cast<uint32_t>(b.rows) ||
        cols != static_cast<uint32_t>(b.cols))
      throw IoError("load_model: block " + name + " does not match expected " + b.name + " in " +
                    path);
    get_doubles(f, b.data, b.count(), path);
  }
  model.weights.check_finite("load_model");
  return model;
}

}  // namespace f0lab
