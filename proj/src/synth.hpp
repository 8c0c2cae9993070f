#pragma once

#include <cstdint>
#include <vector>

#include "features.hpp"
#include "rng.hpp"
#include "signal.hpp"
#include "track.hpp"

namespace f0lab {

enum class SegmentKind { silence, unvoiced, voiced };

// One span of an utterance plan. Voiced segments carry a linear f0 glide
// from f0_start_hz to f0_end_hz.
struct Segment {
  SegmentKind kind = SegmentKind::silence;
  double duration_s = 0.0;
  double f0_start_hz = 0.0;
  double f0_end_hz = 0.0;
};

struct Resonator {
  double center_hz = 0.0;
  double bandwidth_hz = 0.0;
};

// Deterministic recipe for one synthetic utterance: segment plan plus the
// formant resonators the excitation is filtered through.
struct UtteranceSpec {
  std::vector<Segment> segments;
  std::vector<Resonator> formants;
  double peak_amplitude = 0.15;

  double total_duration_s() const;
  // f0 of the generating contour at a point in time; 0 when not voiced.
  double contour_f0_at(double t_s) const;
  void validate(double f0_min_hz, double f0_max_hz) const;
};

// Sawtooth excitation at the contour's instantaneous f0 through the formant
// cascade for voiced spans; filtered noise bursts for unvoiced spans; exact
// zeros for silence. Deterministic for a given (spec, seed).
Signal synthesize_utterance(const UtteranceSpec& spec, int sample_rate, uint64_t seed);

// Ground-truth track aligned with the framing extract_features uses: a frame
// is voiced iff its center sample falls inside a voiced segment, and carries
// the contour f0 at that instant.
F0Track truth_track(const UtteranceSpec& spec, const FeatureConfig& cfg);

// Randomized plan: alternating silence/voiced/unvoiced spans, 3 formants
// with centers in [300, 3500] Hz, contour endpoints inside [f0_lo, f0_hi].
UtteranceSpec random_spec(SplitMix64& rng, double duration_min_s, double duration_max_s,
                          double f0_lo_hz, double f0_hi_hz);

}  // namespace f0lab
