#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "corpus.hpp"
#include "metrics.hpp"
#include "train.hpp"

namespace f0lab {

// Outcome of one training cell (an init kind at one noise level, or the
// pretraining run).
struct CellSummary {
  std::string init_kind;    // "random" | "auto_associative"
  std::string level_label;  // snr label, "pooled", or "clean" for pretraining
  std::string status = "completed";  // "completed" | "failed"
  std::string error;
  int epochs = 0;
  int best_epoch = 0;
  double best_validation_sse = 0.0;
  double epoch1_validation_sse = 0.0;
  std::string stop_reason;
  double l2_init_to_final = 0.0;  // parameter-space distance diagnostic
  double seconds = 0.0;
};

struct RunManifest {
  std::string config_snapshot;
  uint64_t master_seed = 0;
  bool incomplete = false;
  CellSummary pretrain;
  std::vector<CellSummary> cells;
  std::vector<EvalReport> report;
  std::vector<std::string> artifacts;
  double corpus_seconds = 0.0;
  double eval_seconds = 0.0;
  double total_seconds = 0.0;

  void save(const std::string& path) const;
};

// Artifact paths under cfg.out_dir.
std::string pretrain_model_path(const ExperimentConfig& cfg);
std::string cell_model_path(const ExperimentConfig& cfg, const std::string& init_kind,
                            const std::string& level_label);
std::string cell_record_path(const ExperimentConfig& cfg, const std::string& init_kind,
                             const std::string& level_label);
std::string combined_curve_path(const ExperimentConfig& cfg, const std::string& level_label);
std::string report_path(const ExperimentConfig& cfg);
std::string tables_path(const ExperimentConfig& cfg);

// Loads the dataset when dataset.json matches the config, rebuilds it
// otherwise.
Dataset ensure_corpus(const ExperimentConfig& cfg);

// Pretrains the auto-associative network on clean training features and
// persists it with its record; exactly one pretraining per experiment.
CellSummary op_pretrain(const ExperimentConfig& cfg);

// Trains one detection network. level_label is an SNR label or "pooled".
CellSummary op_train_cell(const ExperimentConfig& cfg, const std::string& init_kind,
                          const std::string& level_label);

// All cells implied by cfg (systems x levels, or systems for pooled mode),
// fanned out over worker threads. Failed cells are reported, not fatal.
std::vector<CellSummary> op_train_all(const ExperimentConfig& cfg);

// Evaluates every requested system at every level on the test split and
// writes report.csv.
std::vector<EvalReport> op_eval(const ExperimentConfig& cfg);

// tables.csv (VDE / DR / 100-DR blocks) from report.csv plus combined
// Random-vs-AA validation curves per level.
void op_report(const ExperimentConfig& cfg);

// Fig-2-style contour CSV for one test utterance at one level.
std::string op_contour(const ExperimentConfig& cfg, const std::string& utterance_id,
                       double snr_db, const std::vector<std::string>& systems);

// The whole protocol: corpus, pretraining, all cells, eval, reports, a demo
// contour, run_manifest.json. Cell failures mark the manifest incomplete
// but never discard completed work.
RunManifest op_run_all(const ExperimentConfig& cfg);

}  // namespace f0lab
