#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace f0lab {

namespace {

// Two-pole resonator (Klatt-style digital formant). Unit gain at DC keeps
// cascaded sections from blowing up; segments are rms-normalized afterwards.
struct Biquad {
  double b0 = 1.0, a1 = 0.0, a2 = 0.0;
  double y1 = 0.0, y2 = 0.0;

  static Biquad resonator(double center_hz, double bandwidth_hz, int sample_rate) {
    Biquad q;
    const double r = std::exp(-3.141592653589793 * bandwidth_hz / sample_rate);
    q.a1 = 2.0 * r * std::cos(2.0 * 3.141592653589793 * center_hz / sample_rate);
    q.a2 = -r * r;
    q.b0 = 1.0 - q.a1 - q.a2;
    return q;
  }

  double step(double x) {
    const double y = b0 * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }

  void reset() { y1 = y2 = 0.0; }
};

void apply_fade(std::vector<double>& seg, int fade_len) {
  const int n = static_cast<int>(seg.size());
  fade_len = std::min(fade_len, n / 2);
  for (int i = 0; i < fade_len; ++i) {
    const double w = 0.5 - 0.5 * std::cos(3.141592653589793 * i / fade_len);
    seg[i] *= w;
    seg[n - 1 - i] *= w;
  }
}

void normalize_rms(std::vector<double>& seg, double target_rms) {
  double p = 0.0;
  for (double v : seg) p += v * v;
  p = std::sqrt(p / std::max<size_t>(1, seg.size()));
  if (p > 0.0) {
    const double s = target_rms / p;
    for (double& v : seg) v *= s;
  }
}

}  // namespace

double UtteranceSpec::total_duration_s() const {
  double d = 0.0;
  for (const auto& s : segments) d += s.duration_s;
  return d;
}

double UtteranceSpec::contour_f0_at(double t_s) const {
  double start = 0.0;
  for (const auto& s : segments) {
    const double end = start + s.duration_s;
    if (t_s >= start && t_s < end) {
      if (s.kind != SegmentKind::voiced) return 0.0;
      const double u = s.duration_s > 0 ? (t_s - start) / s.duration_s : 0.0;
      return s.f0_start_hz + (s.f0_end_hz - s.f0_start_hz) * u;
    }
    start = end;
  }
  return 0.0;
}

// Cumulative segment boundaries in samples. Both the synthesizer and the
// truth track derive positions from these, so frame alignment is exact.
static std::vector<int> segment_sample_bounds(const UtteranceSpec& spec, int sample_rate) {
  std::vector<int> bounds(spec.segments.size() + 1, 0);
  double cum = 0.0;
  for (size_t i = 0; i < spec.segments.size(); ++i) {
    cum += spec.segments[i].duration_s;
    bounds[i + 1] = static_cast<int>(std::lround(cum * sample_rate));
  }
  return bounds;
}

void UtteranceSpec::validate(double f0_min_hz, double f0_max_hz) const {
  if (segments.empty() || total_duration_s() <= 0.0)
    throw std::invalid_argument("UtteranceSpec: zero-duration plan");
  for (const auto& s : segments) {
    if (s.duration_s < 0.0) throw std::invalid_argument("UtteranceSpec: negative segment");
    if (s.kind == SegmentKind::voiced) {
      const double lo = std::min(s.f0_start_hz, s.f0_end_hz);
      const double hi = std::max(s.f0_start_hz, s.f0_end_hz);
      if (lo < f0_min_hz || hi > f0_max_hz)
        throw std::invalid_argument("UtteranceSpec: contour outside configured f0 range");
    }
  }
}

Signal synthesize_utterance(const UtteranceSpec& spec, int sample_rate, uint64_t seed) {
  if (sample_rate <= 0) throw std::invalid_argument("synthesize_utterance: bad sample rate");
  if (spec.segments.empty() || spec.total_duration_s() <= 0.0)
    throw std::invalid_argument("synthesize_utterance: zero-duration spec");

  SplitMix64 rng(seed);
  Signal out;
  out.sample_rate = sample_rate;

  std::vector<Biquad> cascade;
  for (const auto& f : spec.formants)
    cascade.push_back(Biquad::resonator(f.center_hz, f.bandwidth_hz, sample_rate));

  const int fade = sample_rate / 50;  // 20 ms edges
  const std::vector<int> bounds = segment_sample_bounds(spec, sample_rate);
  for (size_t si = 0; si < spec.segments.size(); ++si) {
    const auto& seg = spec.segments[si];
    const int n = bounds[si + 1] - bounds[si];
    if (n <= 0) continue;
    std::vector<double> buf(n, 0.0);
    switch (seg.kind) {
      case SegmentKind::silence:
        break;
      case SegmentKind::voiced: {
        double phase = 0.0;
        for (auto& q : cascade) q.reset();
        for (int i = 0; i < n; ++i) {
          const double u = static_cast<double>(i) / n;
          const double f0 = seg.f0_start_hz + (seg.f0_end_hz - seg.f0_start_hz) * u;
          phase += f0 / sample_rate;
          phase -= std::floor(phase);
          double v = 2.0 * phase - 1.0;  // sawtooth, rich in harmonics
          for (auto& q : cascade) v = q.step(v);
          buf[i] = v;
        }
        normalize_rms(buf, 1.0);
        apply_fade(buf, fade);
        break;
      }
      case SegmentKind::unvoiced: {
        Biquad hp = Biquad::resonator(rng.uniform(2000.0, 5000.0), rng.uniform(800.0, 2000.0),
                                      sample_rate);
        for (int i = 0; i < n; ++i) buf[i] = hp.step(rng.gaussian());
        normalize_rms(buf, 0.35);
        apply_fade(buf, fade);
        break;
      }
    }
    out.samples.insert(out.samples.end(), buf.begin(), buf.end());
  }

  // scale the whole utterance to the requested peak
  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double s = spec.peak_amplitude / peak;
    for (double& v : out.samples) v *= s;
  }
  return out;
}

F0Track truth_track(const UtteranceSpec& spec, const FeatureConfig& cfg) {
  const std::vector<int> bounds = segment_sample_bounds(spec, cfg.sample_rate);
  const int n_samples = bounds.back();
  const int n_frames = frame_count(static_cast<size_t>(std::max(0, n_samples)), cfg);
  F0Track track(std::max(0, n_frames));
  const double center_offset = cfg.frame_length() / 2.0;
  for (int t = 0; t < n_frames; ++t) {
    const double center = t * cfg.hop_length() + center_offset;
    // locate the segment whose sample span [bounds[i], bounds[i+1]) holds the
    // frame center, then evaluate the linear glide at that position
    for (size_t si = 0; si < spec.segments.size(); ++si) {
      if (center < bounds[si] || center >= bounds[si + 1]) continue;
      const auto& seg = spec.segments[si];
      if (seg.kind == SegmentKind::voiced) {
        const int n = bounds[si + 1] - bounds[si];
        const double u = n > 0 ? (center - bounds[si]) / n : 0.0;
        const double f0 = seg.f0_start_hz + (seg.f0_end_hz - seg.f0_start_hz) * u;
        if (f0 > 0.0) track[t] = {f0, true};
      }
      break;
    }
  }
  return track;
}

UtteranceSpec random_spec(SplitMix64& rng, double duration_min_s, double duration_max_s,
                          double f0_lo_hz, double f0_hi_hz) {
  UtteranceSpec spec;
  const double target = rng.uniform(duration_min_s, duration_max_s);

  spec.formants.resize(3);
  double prev_center = 0.0;
  for (auto& f : spec.formants) {
    // spread the three resonators out so spectra differ across utterances
    f.center_hz = rng.uniform(std::max(300.0, prev_center + 200.0), 3500.0);
    f.bandwidth_hz = rng.uniform(80.0, 300.0);
    prev_center = f.center_hz;
  }

  double total = 0.0;
  bool have_voiced = false;
  spec.segments.push_back({SegmentKind::silence, rng.uniform(0.08, 0.2), 0, 0});
  total += spec.segments.back().duration_s;
  while (total < target || !have_voiced) {
    const uint64_t pick = rng.below(10);
    Segment s;
    if (pick < 6) {  // voiced spans dominate, as in read speech
      s.kind = SegmentKind::voiced;
      s.duration_s = rng.uniform(0.35, 0.9);
      s.f0_start_hz = rng.uniform(f0_lo_hz, f0_hi_hz);
      // flat, gliding, or mildly moving contours
      const uint64_t shape = rng.below(3);
      if (shape == 0)
        s.f0_end_hz = s.f0_start_hz;
      else if (shape == 1)
        s.f0_end_hz = rng.uniform(f0_lo_hz, f0_hi_hz);
      else
        s.f0_end_hz = std::clamp(s.f0_start_hz * rng.uniform(0.85, 1.18), f0_lo_hz, f0_hi_hz);
      have_voiced = true;
    } else if (pick < 8) {
      s.kind = SegmentKind::unvoiced;
      s.duration_s = rng.uniform(0.1, 0.3);
    } else {
      s.kind = SegmentKind::silence;
      s.duration_s = rng.uniform(0.08, 0.25);
    }
    spec.segments.push_back(s);
    total += s.duration_s;
  }
  return spec;
}

}  // namespace f0lab
