#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "track.hpp"

namespace f0lab {

// Default decision threshold on the network's continuous log_f0 output:
// ln(50), the log of the bottom of the f0 search range. Outputs at or below
// it decode as unvoiced.
inline constexpr double kDefaultDecodeThresholdLog = 3.912023005428146;  // ln(50)

// Percentage of truth-voiced frames where the prediction is voiced and
// |f0_pred - f0_truth| <= 0.05 * f0_truth (linear Hz). Requires at least one
// voiced truth frame.
double detection_rate(const F0Track& predicted, const F0Track& truth);

// Percentage of frames with a wrong voiced/unvoiced decision.
double voice_decision_error(const F0Track& predicted, const F0Track& truth);

// Decodes network output rows (column 0 = log_f0) into a track: voiced iff
// log_f0 strictly exceeds the threshold, with f0 = exp(log_f0).
F0Track track_from_outputs(const Matrix& outputs, double voicing_threshold_log);

// Frame-count accumulator so DR/VDE aggregate across utterances with the
// exact per-frame rules above.
struct VoicingCounts {
  long n = 0;        // all frames
  long n_voiced = 0; // truth-voiced frames (N_p)
  long n_close = 0;  // voiced, predicted voiced, within 5% (N_0.05)
  long n_vu = 0;     // voiced -> unvoiced errors
  long n_uv = 0;     // unvoiced -> voiced errors

  void add(const F0Track& predicted, const F0Track& truth);
  double dr_percent() const;
  double vde_percent() const;
};

// One (system, SNR) table cell.
struct EvalReport {
  std::string system;  // "None" | "LSTM" | "LSTM-AA"
  double snr_db = 0.0;
  double dr_percent = 0.0;
  double vde_percent = 0.0;
  double test_sse = 0.0;
};

// CSV `system,snr_db,dr_percent,vde_percent,test_sse`.
void write_report_csv(const std::string& path, const std::vector<EvalReport>& rows);
std::vector<EvalReport> read_report_csv(const std::string& path);

}  // namespace f0lab
