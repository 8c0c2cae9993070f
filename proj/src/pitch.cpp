#include "pitch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace f0lab {

F0Track baseline_f0(const Signal& signal, const FeatureConfig& cfg) {
  cfg.validate();
  validate_signal(signal, "baseline_f0");
  if (signal.sample_rate != cfg.sample_rate)
    throw std::invalid_argument("baseline_f0: signal rate differs from config");
  const int n_frames = frame_count(signal.size(), cfg);
  if (n_frames < 1)
    throw std::invalid_argument("baseline_f0: signal shorter than one frame");

  const int frame_len = cfg.frame_length();
  const int hop = cfg.hop_length();
  const int lag_min = std::max(1, static_cast<int>(cfg.sample_rate / cfg.f0_max_hz));
  const int lag_max = static_cast<int>(cfg.sample_rate / cfg.f0_min_hz + 0.5);
  const auto& x = signal.samples;
  const int n = static_cast<int>(x.size());

  F0Track track(n_frames);
  std::vector<double> corr(lag_max + 2, 0.0);
  for (int t = 0; t < n_frames; ++t) {
    const int s = t * hop;
    double energy = 0.0;
    for (int i = 0; i < frame_len; ++i) energy += x[s + i] * x[s + i];
    const double log_energy = energy > 0.0 ? std::log(energy) : cfg.energy_floor;
    if (log_energy <= cfg.energy_floor) continue;  // silence gate, stays unvoiced

    // normalized cross-correlation over lags; the lagged window may run past
    // the frame but never past the signal
    const double e0 = energy;
    double best_r = 0.0;
    int best_lag = 0;
    int last_lag = 0;
    for (int lag = lag_min; lag <= lag_max; ++lag) {
      const int avail = std::min(frame_len, n - s - lag);
      if (avail < frame_len / 2) break;  // too close to the signal tail
      double cross = 0.0, e_lag = 0.0;
      const double* a = x.data() + s;
      const double* b = x.data() + s + lag;
      for (int i = 0; i < avail; ++i) {
        cross += a[i] * b[i];
        e_lag += b[i] * b[i];
      }
      const double denom = std::sqrt(e0 * e_lag);
      const double r = denom > 0.0 ? cross / denom : 0.0;
      corr[lag] = r;
      last_lag = lag;
      if (r > best_r) {
        best_r = r;
        best_lag = lag;
      }
    }
    if (best_lag == 0 || best_r <= cfg.voicing_threshold) continue;

    // parabolic refinement around the integer peak
    double lag_refined = best_lag;
    if (best_lag > lag_min && best_lag < last_lag) {
      const double l = corr[best_lag - 1], c = corr[best_lag], r = corr[best_lag + 1];
      const double denom = l - 2.0 * c + r;
      if (std::abs(denom) > 1e-12) {
        double delta = 0.5 * (l - r) / denom;
        delta = std::clamp(delta, -0.5, 0.5);
        lag_refined = best_lag + delta;
      }
    }
    const double f0 = cfg.sample_rate / lag_refined;
    if (f0 >= cfg.f0_min_hz && f0 <= cfg.f0_max_hz) track[t] = {f0, true};
  }
  return track;
}

}  // namespace f0lab
