#pragma once

#include "features.hpp"
#include "signal.hpp"
#include "track.hpp"

namespace f0lab {

// Frame-wise normalized-autocorrelation pitch detector. A frame is voiced
// when the autocorrelation peak over the lag range [sr/f0_max, sr/f0_min]
// exceeds cfg.voicing_threshold and the log frame energy is above the
// configured floor. Voiced frames get sr / lag (parabolically refined),
// unvoiced frames get 0.
F0Track baseline_f0(const Signal& signal, const FeatureConfig& cfg);

}  // namespace f0lab
