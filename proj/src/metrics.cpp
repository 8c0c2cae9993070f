#include "metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "errors.hpp"

namespace f0lab {

void VoicingCounts::add(const F0Track& predicted, const F0Track& truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("VoicingCounts: track lengths differ");
  for (size_t t = 0; t < truth.size(); ++t) {
    ++n;
    const F0Point& p = predicted[t];
    const F0Point& g = truth[t];
    if (g.voiced) {
      ++n_voiced;
      if (!p.voiced)
        ++n_vu;
      else if (std::abs(p.f0_hz - g.f0_hz) <= 0.05 * g.f0_hz)
        ++n_close;
    } else if (p.voiced) {
      ++n_uv;
    }
  }
}

double VoicingCounts::dr_percent() const {
  if (n_voiced == 0)
    throw std::invalid_argument("detection_rate: no voiced frames in truth (DR undefined)");
  return 100.0 * static_cast<double>(n_close) / static_cast<double>(n_voiced);
}

double VoicingCounts::vde_percent() const {
  if (n == 0) throw std::invalid_argument("voice_decision_error: empty tracks");
  return 100.0 * static_cast<double>(n_vu + n_uv) / static_cast<double>(n);
}

double detection_rate(const F0Track& predicted, const F0Track& truth) {
  VoicingCounts c;
  c.add(predicted, truth);
  return c.dr_percent();
}

double voice_decision_error(const F0Track& predicted, const F0Track& truth) {
  VoicingCounts c;
  c.add(predicted, truth);
  return c.vde_percent();
}

F0Track track_from_outputs(const Matrix& outputs, double voicing_threshold_log) {
  if (outputs.cols < 1) throw std::invalid_argument("track_from_outputs: empty rows");
  F0Track track(outputs.rows);
  for (int t = 0; t < outputs.rows; ++t) {
    const double log_f0 = outputs.at(t, 0);
    if (log_f0 > voicing_threshold_log) track[t] = {std::exp(log_f0), true};
  }
  return track;
}

void write_report_csv(const std::string& path, const std::vector<EvalReport>& rows) {
  std::ofstream f(path);
  if (!f) throw IoError("write_report_csv: cannot open " + path);
  f << "system,snr_db,dr_percent,vde_percent,test_sse\n";
  char num[128];
  for (const EvalReport& r : rows) {
    std::snprintf(num, sizeof num, "%s,%g,%.4f,%.4f,%.6f\n", r.system.c_str(), r.snr_db,
                  r.dr_percent, r.vde_percent, r.test_sse);
    f << num;
  }
  if (!f) throw IoError("write_report_csv: short write to " + path);
}

std::vector<EvalReport> read_report_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("read_report_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("system,", 0) != 0)
    throw IoError("read_report_csv: bad header in " + path);
  std::vector<EvalReport> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string system, snr, dr, vde, sse;
    if (!std::getline(ss, system, ',') || !std::getline(ss, snr, ',') ||
        !std::getline(ss, dr, ',') || !std::getline(ss, vde, ',') || !std::getline(ss, sse))
      throw IoError("read_report_csv: malformed row in " + path);
    rows.push_back({system, std::strtod(snr.c_str(), nullptr), std::strtod(dr.c_str(), nullptr),
                    std::strtod(vde.c_str(), nullptr), std::strtod(sse.c_str(), nullptr)});
  }
  return rows;
}

}  // namespace f0lab
