#pragma once

#include <complex>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "signal.hpp"
#include "track.hpp"

namespace f0lab {

// Analysis parameters shared by feature extraction and the autocorrelation
// pitch detector.
struct FeatureConfig {
  int sample_rate = 16000;
  double frame_ms = 25.0;
  double hop_ms = 5.0;
  int fft_size = 0;        // 0 = next power of two >= frame length
  int n_mels = 26;
  int n_mfcc = 13;
  double f0_min_hz = 50.0;
  double f0_max_hz = 500.0;
  double voicing_threshold = 0.5;  // normalized autocorrelation peak gate
  double energy_floor = -20.0;     // clamp for log energies

  int frame_length() const { return static_cast<int>(frame_ms * sample_rate / 1000.0 + 0.5); }
  int hop_length() const { return static_cast<int>(hop_ms * sample_rate / 1000.0 + 0.5); }
  int effective_fft_size() const;
  int feature_dim() const { return 2 + n_mfcc; }

  void validate() const;
};

// One analysis frame: log f0 (0.0 when unvoiced), log frame energy, and
// n_mfcc cepstral coefficients.
struct Frame {
  double log_f0 = 0.0;
  double energy = 0.0;
  std::vector<double> mfcc;
};

// Frames a signal produces at a given length: floor((n - frame)/hop) + 1.
int frame_count(size_t n_samples, const FeatureConfig& cfg);

// In-place radix-2 FFT; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& buf);

// Triangular mel filterbank over the one-sided power spectrum.
struct MelFilterbank {
  int n_fft = 0;
  std::vector<double> center_hz;           // one per filter
  std::vector<int> start_bin;              // first nonzero spectrum bin
  std::vector<std::vector<double>> weight; // triangle weights from start_bin

  static MelFilterbank make(const FeatureConfig& cfg);
  // Log filterbank energies of a one-sided power spectrum, floored.
  std::vector<double> log_energies(const std::vector<double>& power_spectrum,
                                   double floor_log) const;
};

// Orthonormal DCT-II of x (all coefficients) and its inverse (DCT-III).
std::vector<double> dct2(const std::vector<double>& x);
std::vector<double> idct2(const std::vector<double>& c);

// MFCC pipeline: Hann window -> power spectrum -> mel filterbank -> log ->
// DCT-II, keeping n_mfcc coefficients. log_f0 comes from `truth` when given
// (the clean path) and from the autocorrelation baseline otherwise.
std::vector<Frame> extract_features(const Signal& signal, const F0Track* truth,
                                    const FeatureConfig& cfg);

// Row t = [log_f0, energy, mfcc_0..mfcc_{C-1}] of frame t.
Matrix frames_to_matrix(const std::vector<Frame>& frames);

// CSV with header frame_index,log_f0,energy,mfcc_0,...,mfcc_{C-1}. Values
// are written with max_digits10 precision so a round trip is exact.
void write_frames_csv(const std::string& path, const std::vector<Frame>& frames);
Matrix read_frames_csv(const std::string& path);

}  // namespace f0lab
