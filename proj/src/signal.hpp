#pragma once

#include <cstdint>
#include <vector>

namespace f0lab {

// Single-channel audio buffer. Samples are dimensionless amplitudes with a
// nominal range of [-1, 1]; every consumer requires them finite.
struct Signal {
  std::vector<double> samples;
  int sample_rate = 0;

  size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// Mean squared amplitude.
double mean_power(const std::vector<double>& samples);

// Rejects empty buffers, non-positive rates and non-finite samples.
void validate_signal(const Signal& s, const char* context);

// Unit-power white Gaussian noise, deterministic for a given seed.
Signal white_noise(size_t length, int sample_rate, uint64_t seed);

// y[t] = clean[t] + g * noise[t], with g chosen so that
// 10*log10(P_clean / P_{g*noise}) == target_snr_db, powers measured as mean
// squared amplitude over the clean signal's duration. Only the first
// clean.size() noise samples are used.
Signal mix_at_snr(const Signal& clean, const Signal& noise, double target_snr_db);

// Measured SNR in dB between a clean signal and a noise component of equal
// length.
double measure_snr_db(const std::vector<double>& clean, const std::vector<double>& noise);

// Rounds samples onto the 16-bit PCM grid (clamped), so that in-memory
// buffers match what a WAV round trip would produce.
Signal quantize16(const Signal& s);

}  // namespace f0lab
