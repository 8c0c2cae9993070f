#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>

#include "errors.hpp"
#include "pitch.hpp"
#include "pretrain.hpp"
#include "rng.hpp"
#include "wav.hpp"
#include "weights_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace f0lab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string kind_short(const std::string& init_kind) {
  if (init_kind == "random") return "random";
  if (init_kind == "auto_associative") return "aa";
  throw std::invalid_argument("unknown init kind '" + init_kind + "'");
}

std::string kind_for_system(const std::string& system) {
  if (system == "LSTM") return "random";
  if (system == "LSTM-AA") return "auto_associative";
  throw std::invalid_argument("system '" + system + "' has no trained network");
}

// canonical system order for reports and contour columns
const std::vector<std::string> kSystemOrder = {"None", "LSTM", "LSTM-AA"};

std::vector<std::string> ordered_systems(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& s : kSystemOrder)
    if (std::find(cfg.systems.begin(), cfg.systems.end(), s) != cfg.systems.end())
      out.push_back(s);
  return out;
}

bool needs_kind(const ExperimentConfig& cfg, const std::string& kind) {
  for (const auto& s : cfg.systems)
    if (s != "None" && kind_for_system(s) == kind) return true;
  return false;
}

std::vector<SequencePair> load_pairs(const Dataset& ds, const std::vector<std::string>& ids,
                                     const std::vector<double>& levels) {
  std::vector<SequencePair> pairs;
  pairs.reserve(ids.size() * levels.size());
  for (const auto& id : ids) {
    Matrix clean = read_frames_csv(ds.clean_features_path(id));
    for (double level : levels) {
      SequencePair p;
      p.input = read_frames_csv(ds.noisy_features_path(id, level));
      p.target = clean;
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

std::vector<Matrix> load_clean(const Dataset& ds, const std::vector<std::string>& ids) {
  std::vector<Matrix> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(read_frames_csv(ds.clean_features_path(id)));
  return out;
}

std::vector<double> levels_for_label(const ExperimentConfig& cfg, const std::string& label) {
  if (label == "pooled") return cfg.snr_levels;
  for (double level : cfg.snr_levels)
    if (snr_label(level) == label) return {level};
  throw std::invalid_argument("level '" + label + "' is not in snr_levels");
}

json summary_json(const CellSummary& c) {
  return json{{"init_kind", c.init_kind},
              {"level", c.level_label},
              {"status", c.status},
              {"error", c.error},
              {"epochs", c.epochs},
              {"best_epoch", c.best_epoch},
              {"best_validation_sse", c.best_validation_sse},
              {"epoch1_validation_sse", c.epoch1_validation_sse},
              {"stop_reason", c.stop_reason},
              {"l2_init_to_final", c.l2_init_to_final},
              {"seconds", c.seconds}};
}

}  // namespace

void RunManifest::save(const std::string& path) const {
  json j;
  j["format"] = "f0lab-run";
  j["version"] = 1;
  j["master_seed"] = master_seed;
  j["config"] = config_snapshot;
  j["incomplete"] = incomplete;
  j["pretrain"] = summary_json(pretrain);
  j["cells"] = json::array();
  for (const auto& c : cells) j["cells"].push_back(summary_json(c));
  j["report"] = json::array();
  for (const auto& r : report)
    j["report"].push_back(json{{"system", r.system},
                               {"snr_db", r.snr_db},
                               {"dr_percent", r.dr_percent},
                               {"vde_percent", r.vde_percent},
                               {"test_sse", r.test_sse}});
  j["artifacts"] = artifacts;
  j["timings_s"] = json{{"corpus", corpus_seconds}, {"eval", eval_seconds}, {"total", total_seconds}};
  std::ofstream f(path);
  if (!f) throw IoError("RunManifest: cannot write " + path);
  f << j.dump(2) << "\n";
}

std::string pretrain_model_path(const ExperimentConfig& cfg) {
  return cfg.out_dir + "/models/pretrain_aa.f0w";
}

std::string cell_model_path(const ExperimentConfig& cfg, const std::string& init_kind,
                            const std::string& level_label) {
  return cfg.out_dir + "/models/lstm_" + kind_short(init_kind) + "_snr_" + level_label + ".f0w";
}

std::string cell_record_path(const ExperimentConfig& cfg, const std::string& init_kind,
                             const std::string& level_label) {
  return cfg.out_dir + "/curves/curve_" + kind_short(init_kind) + "_snr_" + level_label + ".csv";
}

std::string combined_curve_path(const ExperimentConfig& cfg, const std::string& level_label) {
  return cfg.out_dir + "/curves/combined_snr_" + level_label + ".csv";
}

std::string report_path(const ExperimentConfig& cfg) { return cfg.out_dir + "/report.csv"; }
std::string tables_path(const ExperimentConfig& cfg) { return cfg.out_dir + "/tables.csv"; }

Dataset ensure_corpus(const ExperimentConfig& cfg) {
  cfg.validate();
  const CorpusConfig cc = cfg.corpus_config();
  const std::string manifest_path = cc.dir + "/dataset.json";
  if (fs::exists(manifest_path)) {
    std::ifstream f(manifest_path);
    json existing;
    bool matches = false;
    try {
      f >> existing;
      matches = existing.value("master_seed", uint64_t(0)) == cc.master_seed &&
                existing.value("sample_rate", 0) == cfg.features.sample_rate &&
                existing.value("feature_dim", 0) == cfg.features.feature_dim() &&
                existing.value("snr_levels", std::vector<double>{}) == cc.snr_levels &&
                existing["corpus_config"].value("n_train", 0) == cc.n_train &&
                existing["corpus_config"].value("n_val", 0) == cc.n_val &&
                existing["corpus_config"].value("n_test", 0) == cc.n_test &&
                existing["feature_config"].value("frame_ms", 0.0) == cfg.features.frame_ms &&
                existing["feature_config"].value("hop_ms", 0.0) == cfg.features.hop_ms &&
                existing["feature_config"].value("n_mels", 0) == cfg.features.n_mels &&
                existing["feature_config"].value("n_mfcc", 0) == cfg.features.n_mfcc;
    } catch (const json::exception&) {
      matches = false;
    }
    if (matches) return load_dataset(cc.dir);
  }
  return build_dataset(cc, cfg.features);
}

CellSummary op_pretrain(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  const Dataset ds = ensure_corpus(cfg);
  const std::vector<Matrix> clean_train = load_clean(ds, ds.train);
  const std::vector<Matrix> clean_val = load_clean(ds, ds.validation);

  TrainConfig tc = cfg.pretrain_config();
  tc.seed = derive_seed(cfg.master_seed, "pretrain");
  const ArchSpec arch = cfg.arch();
  TrainResult result = pretrain_autoassociative(arch, clean_train, clean_val, tc);

  fs::create_directories(cfg.out_dir + "/models");
  fs::create_directories(cfg.out_dir + "/curves");
  save_model(pretrain_model_path(cfg), {result.weights, result.stats, "auto_associative"});
  write_record_csv(cfg.out_dir + "/curves/curve_pretrain_aa.csv", result.record);

  CellSummary s;
  s.init_kind = "auto_associative";
  s.level_label = "clean";
  s.epochs = static_cast<int>(result.record.epochs.size());
  s.best_epoch = result.record.best_epoch;
  s.best_validation_sse = result.record.best_validation_sse;
  s.epoch1_validation_sse = result.record.epochs.front().val_sse;
  s.stop_reason = to_string(result.record.stop_reason);
  s.l2_init_to_final =
      parameter_distance(init_random(arch, derive_seed(tc.seed, "pretrain/init")), result.weights);
  s.seconds = seconds_since(t0);
  return s;
}

CellSummary op_train_cell(const ExperimentConfig& cfg, const std::string& init_kind,
                          const std::string& level_label) {
  cfg.validate();
  const auto t0 = Clock::now();
  const Dataset ds = ensure_corpus(cfg);
  const std::vector<double> levels = levels_for_label(cfg, level_label);
  const std::vector<SequencePair> train_pairs = load_pairs(ds, ds.train, levels);
  const std::vector<SequencePair> val_pairs = load_pairs(ds, ds.validation, levels);

  const ArchSpec arch = cfg.arch();
  LstmWeights init_weights;
  if (init_kind == "random") {
    init_weights = init_random(arch, derive_seed(cfg.master_seed, "cell/random/" + level_label + "/init"));
  } else if (init_kind == "auto_associative") {
    const std::string aa_path = pretrain_model_path(cfg);
    if (!fs::exists(aa_path))
      throw IoError("op_train_cell: pretrained weights missing at " + aa_path +
                    " (run pretrain first)");
    init_weights = transfer_weights(load_model(aa_path).weights, arch);
  } else {
    throw std::invalid_argument("op_train_cell: unknown init kind '" + init_kind + "'");
  }

  TrainConfig tc = cfg.train_config();
  tc.seed = derive_seed(cfg.master_seed, "cell/" + init_kind + "/" + level_label + "/train");
  TrainResult result = train(init_weights, train_pairs, val_pairs, tc);

  fs::create_directories(cfg.out_dir + "/models");
  fs::create_directories(cfg.out_dir + "/curves");
  save_model(cell_model_path(cfg, init_kind, level_label),
             {result.weights, result.stats, init_kind});
  write_record_csv(cell_record_path(cfg, init_kind, level_label), result.record);

  CellSummary s;
  s.init_kind = init_kind;
  s.level_label = level_label;
  s.epochs = static_cast<int>(result.record.epochs.size());
  s.best_epoch = result.record.best_epoch;
  s.best_validation_sse = result.record.best_validation_sse;
  s.epoch1_validation_sse = result.record.epochs.front().val_sse;
  s.stop_reason = to_string(result.record.stop_reason);
  s.l2_init_to_final = parameter_distance(init_weights, result.weights);
  s.seconds = seconds_since(t0);
  return s;
}

std::vector<CellSummary> op_train_all(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_corpus(cfg);  // build once before workers start

  struct CellSpec {
    std::string kind;
    std::string label;
  };
  std::vector<CellSpec> specs;
  for (const std::string kind : {"random", "auto_associative"}) {
    if (!needs_kind(cfg, kind)) continue;
    if (cfg.train_mode == "pooled") {
      specs.push_back({kind, "pooled"});
    } else {
      for (double level : cfg.snr_levels) specs.push_back({kind, snr_label(level)});
    }
  }

  std::vector<CellSummary> summaries(specs.size());
  if (specs.empty()) return summaries;

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const size_t n_workers = std::min<size_t>(
      specs.size(), cfg.threads > 0 ? static_cast<size_t>(cfg.threads) : hw);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < specs.size(); i = next.fetch_add(1)) {
      try {
        summaries[i] = op_train_cell(cfg, specs[i].kind, specs[i].label);
      } catch (const std::exception& e) {
        summaries[i].init_kind = specs[i].kind;
        summaries[i].level_label = specs[i].label;
        summaries[i].status = "failed";
        summaries[i].error = std::string("cell (") + specs[i].kind + ", snr " + specs[i].label +
                             "): " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return summaries;
}

std::vector<EvalReport> op_eval(const ExperimentConfig& cfg) {
  cfg.validate();
  const Dataset ds = ensure_corpus(cfg);
  const std::vector<std::string> systems = ordered_systems(cfg);

  // truth tracks and clean features for the test split
  std::map<std::string, F0Track> truth;
  std::map<std::string, Matrix> clean;
  for (const auto& id : ds.test) {
    truth[id] = read_truth_csv(ds.truth_csv_path(id));
    clean[id] = read_frames_csv(ds.clean_features_path(id));
  }

  std::vector<EvalReport> rows;
  for (double level : cfg.snr_levels) {
    const std::string label = snr_label(level);
    for (const auto& system : systems) {
      EvalReport row;
      row.system = system;
      row.snr_db = level;
      VoicingCounts counts;
      double sse = 0.0;
      if (system == "None") {
        for (const auto& id : ds.test) {
          const Signal noisy = read_wav(ds.noisy_wav_path(id, level));
          counts.add(baseline_f0(noisy, cfg.features), truth[id]);
          sse += sse_loss(read_frames_csv(ds.noisy_features_path(id, level)), clean[id]);
        }
      } else {
        const std::string kind = kind_for_system(system);
        const std::string model_label = cfg.train_mode == "pooled" ? "pooled" : label;
        const std::string path = cell_model_path(cfg, kind, model_label);
        if (!fs::exists(path))
          throw IoError("op_eval: missing model " + path + " for system " + system);
        const Model model = load_model(path);
        for (const auto& id : ds.test) {
          const Matrix inputs = read_frames_csv(ds.noisy_features_path(id, level));
          const Matrix outputs = forward(model.weights, model.stats.apply(inputs)).outputs;
          counts.add(track_from_outputs(outputs, cfg.decode_threshold_log_f0), truth[id]);
          sse += sse_loss(outputs, clean[id]);
        }
      }
      row.dr_percent = counts.dr_percent();
      row.vde_percent = counts.vde_percent();
      row.test_sse = sse;
      rows.push_back(row);
    }
  }
  fs::create_directories(cfg.out_dir);
  write_report_csv(report_path(cfg), rows);
  return rows;
}

namespace {

void write_tables_csv(const ExperimentConfig& cfg, const std::vector<EvalReport>& rows) {
  const std::vector<std::string> systems = ordered_systems(cfg);
  std::ofstream f(tables_path(cfg));
  if (!f) throw IoError("op_report: cannot write " + tables_path(cfg));
  f << "metric,snr_db";
  for (const auto& s : systems) f << "," << s;
  f << "\n";
  auto value_of = [&rows](const std::string& system, double level, auto proj) {
    for (const auto& r : rows)
      if (r.system == system && r.snr_db == level) return proj(r);
    return std::numeric_limits<double>::quiet_NaN();
  };
  char num[64];
  // VDE (lower is better), DR (higher is better), and 100-DR for comparison
  // with conventions that report the complement
  const struct {
    const char* name;
    double (*proj)(const EvalReport&);
  } metrics[] = {
      {"vde_percent", [](const EvalReport& r) { return r.vde_percent; }},
      {"dr_percent", [](const EvalReport& r) { return r.dr_percent; }},
      {"dr_complement_percent", [](const EvalReport& r) { return 100.0 - r.dr_percent; }},
  };
  for (const auto& m : metrics) {
    for (double level : cfg.snr_levels) {
      f << m.name << "," << snr_label(level);
      for (const auto& s : systems) {
        const double v = value_of(s, level, m.proj);
        if (std::isnan(v)) {
          f << ",";
        } else {
          std::snprintf(num, sizeof num, ",%.4f", v);
          f << num;
        }
      }
      f << "\n";
    }
  }
}

void write_combined_curves(const ExperimentConfig& cfg) {
  if (cfg.train_mode == "pooled") return;  // per-level pairing does not apply
  for (double level : cfg.snr_levels) {
    const std::string label = snr_label(level);
    const std::string random_path = cell_record_path(cfg, "random", label);
    const std::string aa_path = cell_record_path(cfg, "auto_associative", label);
    if (!fs::exists(random_path) || !fs::exists(aa_path)) continue;
    const TrainRecord random_rec = read_record_csv(random_path);
    const TrainRecord aa_rec = read_record_csv(aa_path);
    std::ofstream f(combined_curve_path(cfg, label));
    if (!f) throw IoError("op_report: cannot write " + combined_curve_path(cfg, label));
    f << "epoch,random,auto_associative\n";
    const size_t n = std::max(random_rec.epochs.size(), aa_rec.epochs.size());
    char num[64];
    for (size_t i = 0; i < n; ++i) {
      f << (i + 1);
      if (i < random_rec.epochs.size()) {
        std::snprintf(num, sizeof num, ",%.17g", random_rec.epochs[i].val_sse);
        f << num;
      } else {
        f << ",";
      }
      if (i < aa_rec.epochs.size()) {
        std::snprintf(num, sizeof num, ",%.17g", aa_rec.epochs[i].val_sse);
        f << num;
      } else {
        f << ",";
      }
      f << "\n";
    }
  }
}

}  // namespace

void op_report(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!fs::exists(report_path(cfg)))
    throw IoError("op_report: " + report_path(cfg) + " missing (run eval first)");
  write_tables_csv(cfg, read_report_csv(report_path(cfg)));
  write_combined_curves(cfg);
}

std::string op_contour(const ExperimentConfig& cfg, const std::string& utterance_id,
                       double snr_db, const std::vector<std::string>& systems) {
  cfg.validate();
  const Dataset ds = ensure_corpus(cfg);
  if (std::find(ds.test.begin(), ds.test.end(), utterance_id) == ds.test.end())
    throw std::invalid_argument("op_contour: utterance '" + utterance_id +
                                "' is not in the test split");
  const std::string label = snr_label(snr_db);
  std::vector<std::string> wanted;
  for (const auto& s : kSystemOrder)
    if (std::find(systems.begin(), systems.end(), s) != systems.end()) wanted.push_back(s);
  if (wanted.empty()) throw std::invalid_argument("op_contour: no known system requested");

  const F0Track truth = read_truth_csv(ds.truth_csv_path(utterance_id));
  std::map<std::string, F0Track> predicted;
  for (const auto& system : wanted) {
    if (system == "None") {
      predicted[system] = baseline_f0(read_wav(ds.noisy_wav_path(utterance_id, snr_db)), cfg.features);
    } else {
      const std::string kind = kind_for_system(system);
      const std::string model_label = cfg.train_mode == "pooled" ? "pooled" : label;
      const Model model = load_model(cell_model_path(cfg, kind, model_label));
      const Matrix inputs = read_frames_csv(ds.noisy_features_path(utterance_id, snr_db));
      const Matrix outputs = forward(model.weights, model.stats.apply(inputs)).outputs;
      predicted[system] = track_from_outputs(outputs, cfg.decode_threshold_log_f0);
    }
  }

  const std::string path =
      cfg.out_dir + "/contour_" + utterance_id + "_snr_" + label + ".csv";
  std::ofstream f(path);
  if (!f) throw IoError("op_contour: cannot write " + path);
  f << "frame_index,truth_f0";
  for (const auto& s : wanted) {
    if (s == "None") f << ",none_f0";
    if (s == "LSTM") f << ",lstm_f0";
    if (s == "LSTM-AA") f << ",lstm_aa_f0";
  }
  f << "\n";
  char num[64];
  for (size_t t = 0; t < truth.size(); ++t) {
    f << t;
    std::snprintf(num, sizeof num, ",%.17g", truth[t].voiced ? truth[t].f0_hz : 0.0);
    f << num;
    for (const auto& s : wanted) {
      const F0Point& p = predicted[s][t];
      std::snprintf(num, sizeof num, ",%.17g", p.voiced ? p.f0_hz : 0.0);
      f << num;
    }
    f << "\n";
  }
  return path;
}

RunManifest op_run_all(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  RunManifest manifest;
  manifest.config_snapshot = cfg.canonical();
  manifest.master_seed = cfg.master_seed;

  fs::create_directories(cfg.out_dir);

  const auto corpus_t0 = Clock::now();
  const Dataset ds = ensure_corpus(cfg);
  manifest.corpus_seconds = seconds_since(corpus_t0);
  manifest.artifacts.push_back(ds.dir + "/dataset.json");

  const bool want_aa = needs_kind(cfg, "auto_associative");
  if (want_aa) {
    try {
      manifest.pretrain = op_pretrain(cfg);
      manifest.artifacts.push_back(pretrain_model_path(cfg));
    } catch (const std::exception& e) {
      manifest.pretrain.status = "failed";
      manifest.pretrain.error = e.what();
      manifest.incomplete = true;
    }
  }

  manifest.cells = op_train_all(cfg);
  for (const auto& c : manifest.cells) {
    if (c.status != "completed") {
      manifest.incomplete = true;
      continue;
    }
    manifest.artifacts.push_back(cell_model_path(cfg, c.init_kind, c.level_label));
    manifest.artifacts.push_back(cell_record_path(cfg, c.init_kind, c.level_label));
  }

  const auto eval_t0 = Clock::now();
  try {
    manifest.report = op_eval(cfg);
    manifest.artifacts.push_back(report_path(cfg));
    op_report(cfg);
    manifest.artifacts.push_back(tables_path(cfg));
  } catch (const std::exception& e) {
    manifest.incomplete = true;
    CellSummary note;
    note.init_kind = "eval";
    note.level_label = "-";
    note.status = "failed";
    note.error = e.what();
    manifest.cells.push_back(note);
  }
  manifest.eval_seconds = seconds_since(eval_t0);

  // demo contour at -5 dB when present, else the first level
  if (!manifest.incomplete && !ds.test.empty()) {
    double demo_level = cfg.snr_levels.front();
    for (double level : cfg.snr_levels)
      if (level == -5.0) demo_level = level;
    try {
      manifest.artifacts.push_back(op_contour(cfg, ds.test.front(), demo_level, cfg.systems));
    } catch (const std::exception& e) {
      manifest.incomplete = true;
      CellSummary note;
      note.init_kind = "contour";
      note.level_label = snr_label(demo_level);
      note.status = "failed";
      note.error = e.what();
      manifest.cells.push_back(note);
    }
  }

  manifest.total_seconds = seconds_since(t0);
  manifest.save(cfg.out_dir + "/run_manifest.json");
  return manifest;
}

}  // namespace f0lab
