#include "signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace f0lab {

double mean_power(const std::vector<double>& samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (double s : samples) sum += s * s;
  return sum / static_cast<double>(samples.size());
}

void validate_signal(const Signal& s, const char* context) {
  if (s.sample_rate <= 0)
    throw std::invalid_argument(std::string(context) + ": sample_rate must be positive");
  if (s.samples.empty())
    throw std::invalid_argument(std::string(context) + ": signal is empty");
  for (double v : s.samples)
    if (!std::isfinite(v))
      throw std::invalid_argument(std::string(context) + ": signal contains non-finite samples");
}

Signal white_noise(size_t length, int sample_rate, uint64_t seed) {
  if (length == 0) throw std::invalid_argument("white_noise: length must be positive");
  SplitMix64 rng(seed);
  Signal out;
  out.sample_rate = sample_rate;
  out.samples.resize(length);
  for (double& s : out.samples) s = rng.gaussian();
  double p = mean_power(out.samples);
  if (p <= 0.0) throw NumericError("white_noise: degenerate zero-power draw");
  double scale = 1.0 / std::sqrt(p);
  for (double& s : out.samples) s *= scale;
  return out;
}

Signal mix_at_snr(const Signal& clean, const Signal& noise, double target_snr_db) {
  validate_signal(clean, "mix_at_snr(clean)");
  validate_signal(noise, "mix_at_snr(noise)");
  if (clean.sample_rate != noise.sample_rate)
    throw std::invalid_argument("mix_at_snr: sample rates differ");
  if (noise.samples.size() < clean.samples.size())
    throw std::invalid_argument("mix_at_snr: noise shorter than clean signal");

  const size_t n = clean.samples.size();
  double p_clean = mean_power(clean.samples);
  double p_noise = 0.0;
  for (size_t i = 0; i < n; ++i) p_noise += noise.samples[i] * noise.samples[i];
  p_noise /= static_cast<double>(n);
  if (p_clean <= 0.0) throw std::invalid_argument("mix_at_snr: clean signal has zero power");
  if (p_noise <= 0.0) throw std::invalid_argument("mix_at_snr: noise has zero power");

  // P_clean / (g^2 * P_noise) = 10^(snr/10)
  double gain = std::sqrt(p_clean / (p_noise * std::pow(10.0, target_snr_db / 10.0)));

  Signal out;
  out.sample_rate = clean.sample_rate;
  out.samples.resize(n);
  for (size_t i = 0; i < n; ++i) out.samples[i] = clean.samples[i] + gain * noise.samples[i];
  return out;
}

double measure_snr_db(const std::vector<double>& clean, const std::vector<double>& noise) {
  double p_clean = mean_power(clean);
  double p_noise = mean_power(noise);
  if (p_clean <= 0.0 || p_noise <= 0.0)
    throw std::invalid_argument("measure_snr_db: zero-power component");
  return 10.0 * std::log10(p_clean / p_noise);
}

Signal quantize16(const Signal& s) {
  Signal out;
  out.sample_rate = s.sample_rate;
  out.samples.resize(s.samples.size());
  for (size_t i = 0; i < s.samples.size(); ++i) {
    double v = std::lrint(s.samples[i] * 32768.0);
    v = std::clamp(v, -32768.0, 32767.0);
    out.samples[i] = v / 32768.0;
  }
  return out;
}

}  // namespace f0lab
