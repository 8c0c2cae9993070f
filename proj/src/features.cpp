#include "features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "errors.hpp"
#include "pitch.hpp"

namespace f0lab {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }
}  // namespace

int FeatureConfig::effective_fft_size() const {
  if (fft_size > 0) return fft_size;
  int n = 1;
  while (n < frame_length()) n <<= 1;
  return n;
}

void FeatureConfig::validate() const {
  if (sample_rate <= 0) throw std::invalid_argument("FeatureConfig: sample_rate must be positive");
  if (frame_ms <= 0 || hop_ms <= 0)
    throw std::invalid_argument("FeatureConfig: frame_ms and hop_ms must be positive");
  if (hop_length() > frame_length())
    throw std::invalid_argument("FeatureConfig: hop larger than frame length");
  if (fft_size > 0 && fft_size < frame_length())
    throw std::invalid_argument("FeatureConfig: fft_size smaller than frame length");
  if ((effective_fft_size() & (effective_fft_size() - 1)) != 0)
    throw std::invalid_argument("FeatureConfig: fft_size must be a power of two");
  if (n_mels < n_mfcc)
    throw std::invalid_argument("FeatureConfig: mel filter count below n_mfcc");
  if (n_mfcc < 1) throw std::invalid_argument("FeatureConfig: n_mfcc must be >= 1");
  if (!(f0_min_hz > 0) || !(f0_max_hz > f0_min_hz))
    throw std::invalid_argument("FeatureConfig: need 0 < f0_min < f0_max");
  if (f0_max_hz > sample_rate / 2.0)
    throw std::invalid_argument("FeatureConfig: f0_max above Nyquist");
}

int frame_count(size_t n_samples, const FeatureConfig& cfg) {
  const int frame = cfg.frame_length();
  const int hop = cfg.hop_length();
  if (n_samples < static_cast<size_t>(frame)) return 0;
  return static_cast<int>((n_samples - frame) / hop) + 1;
}

void fft_inplace(std::vector<std::complex<double>>& buf) {
  const size_t n = buf.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft_inplace: size must be a power of two");
  // bit-reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(buf[i], buf[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = buf[i + k];
        std::complex<double> v = buf[i + k + len / 2] * w;
        buf[i + k] = u + v;
        buf[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

MelFilterbank MelFilterbank::make(const FeatureConfig& cfg) {
  MelFilterbank fb;
  fb.n_fft = cfg.effective_fft_size();
  const int n_bins = fb.n_fft / 2 + 1;
  const double f_min = 0.0;
  const double f_max = cfg.sample_rate / 2.0;
  const int m = cfg.n_mels;

  // m + 2 edge points equally spaced on the mel scale
  std::vector<double> edges_hz(m + 2);
  const double mel_lo = hz_to_mel(f_min);
  const double mel_hi = hz_to_mel(f_max);
  for (int i = 0; i < m + 2; ++i)
    edges_hz[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (m + 1));

  fb.center_hz.resize(m);
  fb.start_bin.resize(m);
  fb.weight.resize(m);
  const double hz_per_bin = static_cast<double>(cfg.sample_rate) / fb.n_fft;
  for (int f = 0; f < m; ++f) {
    const double lo = edges_hz[f], mid = edges_hz[f + 1], hi = edges_hz[f + 2];
    fb.center_hz[f] = mid;
    int first = -1;
    std::vector<double> w;
    for (int b = 0; b < n_bins; ++b) {
      const double hz = b * hz_per_bin;
      double value = 0.0;
      if (hz > lo && hz < hi)
        value = hz <= mid ? (hz - lo) / (mid - lo) : (hi - hz) / (hi - mid);
      if (value > 0.0) {
        if (first < 0) first = b;
        w.push_back(value);
      } else if (first >= 0) {
        break;
      }
    }
    if (first < 0) {  // degenerate narrow filter; keep a single-bin fallback
      first = std::min(n_bins - 1, static_cast<int>(mid / hz_per_bin));
      w.assign(1, 1.0);
    }
    fb.start_bin[f] = first;
    fb.weight[f] = std::move(w);
  }
  return fb;
}

std::vector<double> MelFilterbank::log_energies(const std::vector<double>& power_spectrum,
                                                double floor_log) const {
  std::vector<double> out(center_hz.size());
  for (size_t f = 0; f < center_hz.size(); ++f) {
    double e = 0.0;
    const auto& w = weight[f];
    const int s = start_bin[f];
    for (size_t k = 0; k < w.size(); ++k) e += w[k] * power_spectrum[s + k];
    out[f] = e > 0.0 ? std::max(std::log(e), floor_log) : floor_log;
  }
  return out;
}

std::vector<double> dct2(const std::vector<double>& x) {
  const int m = static_cast<int>(x.size());
  std::vector<double> c(m, 0.0);
  for (int k = 0; k < m; ++k) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += x[i] * std::cos(kPi * k * (i + 0.5) / m);
    const double scale = k == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
    c[k] = scale * sum;
  }
  return c;
}

std::vector<double> idct2(const std::vector<double>& c) {
  const int m = static_cast<int>(c.size());
  std::vector<double> x(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double sum = std::sqrt(1.0 / m) * c[0];
    for (int k = 1; k < m; ++k)
      sum += std::sqrt(2.0 / m) * c[k] * std::cos(kPi * k * (i + 0.5) / m);
    x[i] = sum;
  }
  return x;
}

std::vector<Frame> extract_features(const Signal& signal, const F0Track* truth,
                                    const FeatureConfig& cfg) {
  cfg.validate();
  validate_signal(signal, "extract_features");
  if (signal.sample_rate != cfg.sample_rate)
    throw std::invalid_argument("extract_features: signal rate differs from config");
  const int frame_len = cfg.frame_length();
  const int hop = cfg.hop_length();
  const int n_frames = frame_count(signal.size(), cfg);
  if (n_frames < 1)
    throw std::invalid_argument("extract_features: signal shorter than one frame");
  if (truth && static_cast<int>(truth->size()) != n_frames)
    throw std::invalid_argument("extract_features: truth track length mismatch");

  F0Track fallback;
  if (!truth) {
    fallback = baseline_f0(signal, cfg);
    truth = &fallback;
  }

  const int n_fft = cfg.effective_fft_size();
  const int n_bins = n_fft / 2 + 1;
  const MelFilterbank fb = MelFilterbank::make(cfg);

  std::vector<double> hann(frame_len);
  for (int i = 0; i < frame_len; ++i)
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (frame_len - 1));

  std::vector<Frame> frames(n_frames);
  std::vector<std::complex<double>> buf(n_fft);
  std::vector<double> power(n_bins);
  for (int t = 0; t < n_frames; ++t) {
    const double* x = signal.samples.data() + static_cast<size_t>(t) * hop;
    double energy = 0.0;
    for (int i = 0; i < frame_len; ++i) {
      const double v = hann[i] * x[i];
      buf[i] = {v, 0.0};
      energy += v * v;
    }
    for (int i = frame_len; i < n_fft; ++i) buf[i] = {0.0, 0.0};
    fft_inplace(buf);
    for (int b = 0; b < n_bins; ++b) power[b] = std::norm(buf[b]);

    Frame& fr = frames[t];
    fr.energy = energy > 0.0 ? std::max(std::log(energy), cfg.energy_floor) : cfg.energy_floor;
    const std::vector<double> mel = fb.log_energies(power, cfg.energy_floor);
    std::vector<double> cep = dct2(mel);
    cep.resize(cfg.n_mfcc);
    fr.mfcc = std::move(cep);
    const F0Point& p = (*truth)[t];
    fr.log_f0 = p.voiced && p.f0_hz > 0.0 ? std::log(p.f0_hz) : 0.0;
  }
  return frames;
}

Matrix frames_to_matrix(const std::vector<Frame>& frames) {
  if (frames.empty()) return {};
  const int dim = 2 + static_cast<int>(frames[0].mfcc.size());
  Matrix m(static_cast<int>(frames.size()), dim);
  for (int t = 0; t < m.rows; ++t) {
    double* r = m.row(t);
    r[0] = frames[t].log_f0;
    r[1] = frames[t].energy;
    for (size_t c = 0; c < frames[t].mfcc.size(); ++c) r[2 + c] = frames[t].mfcc[c];
  }
  return m;
}

void write_frames_csv(const std::string& path, const std::vector<Frame>& frames) {
  std::ofstream f(path);
  if (!f) throw IoError("write_frames_csv: cannot open " + path);
  const int n_mfcc = frames.empty() ? 0 : static_cast<int>(frames[0].mfcc.size());
  f << "frame_index,log_f0,energy";
  for (int c = 0; c < n_mfcc; ++c) f << ",mfcc_" << c;
  f << "\n";
  char num[40];
  for (size_t t = 0; t < frames.size(); ++t) {
    f << t;
    std::snprintf(num, sizeof num, ",%.17g", frames[t].log_f0);
    f << num;
    std::snprintf(num, sizeof num, ",%.17g", frames[t].energy);
    f << num;
    for (double v : frames[t].mfcc) {
      std::snprintf(num, sizeof num, ",%.17g", v);
      f << num;
    }
    f << "\n";
  }
  if (!f) throw IoError("write_frames_csv: short write to " + path);
}

Matrix read_frames_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("read_frames_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw IoError("read_frames_csv: empty file " + path);
  // header is frame_index plus one column per feature component
  const int dim = static_cast<int>(std::count(line.begin(), line.end(), ','));
  std::vector<double> values;
  int rows = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col > 0) values.push_back(std::strtod(cell.c_str(), nullptr));
      ++col;
    }
    if (col != dim + 1)
      throw IoError("read_frames_csv: ragged row in " + path);
    ++rows;
  }
  Matrix m(rows, dim);
  std::copy(values.begin(), values.end(), m.a.begin());
  return m;
}

}  // namespace f0lab
