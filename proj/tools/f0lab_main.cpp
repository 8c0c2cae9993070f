// Command-line driver for the f0lab shared library. Talks to the core
// exclusively through the C API in f0lab.h.

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "f0lab.h"

namespace {

struct ConfigDeleter {
  void operator()(f0lab_config* c) const { f0lab_config_free(c); }
};
using ConfigHandle = std::unique_ptr<f0lab_config, ConfigDeleter>;

// Options shared by every subcommand; only flags the user actually passed
// are applied, so config-file values survive unless overridden.
struct CommonOpts {
  std::string config_file;
  std::map<std::string, std::string> overrides;
  bool paper_scale = false;
};

void add_common_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_file, "key = value config file");
  cmd->add_flag("--paper-scale", opts.paper_scale,
                "use the 800/150/50 utterance counts instead of the desk-scale 80/15/10");

  auto capture = [&opts](const std::string& key) {
    return [&opts, key](const std::string& value) { opts.overrides[key] = value; };
  };
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static const Flag flags[] = {
      {"-o,--out", "out_dir", "output directory"},
      {"-s,--seed", "master_seed", "master seed; pins every random choice"},
      {"--n-train", "n_train", "training utterances"},
      {"--n-val", "n_val", "validation utterances"},
      {"--n-test", "n_test", "test utterances"},
      {"--snr", "snr_levels", "comma list of SNR levels in dB"},
      {"--duration-min", "duration_min_s", "min utterance duration (s)"},
      {"--duration-max", "duration_max_s", "max utterance duration (s)"},
      {"--contour-f0-min", "contour_f0_min_hz", "lowest synthesized f0 (Hz)"},
      {"--contour-f0-max", "contour_f0_max_hz", "highest synthesized f0 (Hz)"},
      {"--sample-rate", "sample_rate", "sample rate (Hz)"},
      {"--frame-ms", "frame_ms", "analysis frame length (ms)"},
      {"--hop-ms", "hop_ms", "analysis hop (ms)"},
      {"--fft-size", "fft_size", "FFT size (0 = auto power of two)"},
      {"--n-mels", "n_mels", "mel filter count"},
      {"--n-mfcc", "n_mfcc", "cepstral coefficient count"},
      {"--f0-min", "f0_min_hz", "pitch search floor (Hz)"},
      {"--f0-max", "f0_max_hz", "pitch search ceiling (Hz)"},
      {"--voicing-threshold", "voicing_threshold", "autocorrelation voicing gate"},
      {"--hidden", "hidden_sizes", "comma list of hidden layer sizes"},
      {"--lr", "learning_rate", "learning rate"},
      {"--clip", "clip_norm", "global gradient norm clip"},
      {"--patience", "patience", "early-stopping patience (epochs)"},
      {"--max-epochs", "max_epochs", "epoch cap"},
      {"--pretrain-lr", "pretrain_learning_rate", "pretraining learning rate"},
      {"--pretrain-clip", "pretrain_clip_norm", "pretraining gradient clip"},
      {"--pretrain-patience", "pretrain_patience", "pretraining patience"},
      {"--pretrain-max-epochs", "pretrain_max_epochs", "pretraining epoch cap"},
      {"--systems", "systems", "comma subset of None,LSTM,LSTM-AA"},
      {"--decode-threshold", "decode_threshold_log_f0", "voicing threshold on output log f0"},
      {"--train-mode", "train_mode", "matched (one net per SNR) or pooled"},
      {"--threads", "threads", "training cell workers (0 = auto)"},
      {"--verbose", "verbose", "per-epoch logging (true/false)"},
  };
  for (const auto& f : flags)
    cmd->add_option_function<std::string>(f.name, capture(f.key), f.help);
}

int apply_common(const ConfigHandle& cfg, const CommonOpts& opts) {
  if (!opts.config_file.empty() &&
      f0lab_config_load_file(cfg.get(), opts.config_file.c_str()) != F0LAB_OK) {
    std::fprintf(stderr, "error: %s\n", f0lab_last_error());
    return 1;
  }
  if (opts.paper_scale) {
    f0lab_config_set(cfg.get(), "n_train", "800");
    f0lab_config_set(cfg.get(), "n_val", "150");
    f0lab_config_set(cfg.get(), "n_test", "50");
  }
  for (const auto& [key, value] : opts.overrides) {
    if (f0lab_config_set(cfg.get(), key.c_str(), value.c_str()) != F0LAB_OK) {
      std::fprintf(stderr, "error: %s\n", f0lab_last_error());
      return 1;
    }
  }
  return 0;
}

int finish(f0lab_status status, const char* action) {
  if (status == F0LAB_OK) {
    std::printf("%s: done\n", action);
    return 0;
  }
  std::fprintf(stderr, "%s: %s (status %d)\n", action, f0lab_last_error(), status);
  return status == F0LAB_ERR_INCOMPLETE ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"f0lab — LSTM-based fundamental frequency detection in noisy speech"};
  app.require_subcommand(1);

  ConfigHandle cfg(f0lab_config_new());
  if (!cfg) {
    std::fprintf(stderr, "error: out of memory\n");
    return 1;
  }

  CommonOpts opts;
  std::string train_init = "both";
  std::vector<double> train_levels;
  std::string contour_utt;
  double contour_level = 0.0;
  std::string contour_systems;

  auto* gen = app.add_subcommand("gen-corpus", "synthesize the corpus and its noisy variants");
  add_common_options(gen, opts);
  auto* pre = app.add_subcommand("pretrain", "train the auto-associative network on clean features");
  add_common_options(pre, opts);
  auto* train = app.add_subcommand("train", "train detection networks (noisy -> clean)");
  add_common_options(train, opts);
  train->add_option("--init", train_init, "random | auto_associative | both");
  train->add_option("--level", train_levels, "restrict to these SNR levels (default: all)");
  auto* eval = app.add_subcommand("eval", "evaluate systems on the test split, write report.csv");
  add_common_options(eval, opts);
  auto* report = app.add_subcommand("report", "write tables.csv and combined training curves");
  add_common_options(report, opts);
  auto* contour = app.add_subcommand("contour", "export an f0 contour CSV for one test utterance");
  add_common_options(contour, opts);
  contour->add_option("--utterance", contour_utt, "utterance id (test split)")->required();
  contour->add_option("--level", contour_level, "SNR level in dB")->required();
  contour->add_option("--systems", contour_systems, "comma subset of None,LSTM,LSTM-AA");
  auto* runall = app.add_subcommand("run-all", "corpus, pretraining, all cells, eval, reports");
  add_common_options(runall, opts);

  CLI11_PARSE(app, argc, argv);

  if (int rc = apply_common(cfg, opts)) return rc;

  if (gen->parsed()) return finish(f0lab_gen_corpus(cfg.get()), "gen-corpus");
  if (pre->parsed()) return finish(f0lab_pretrain(cfg.get()), "pretrain");
  if (train->parsed()) {
    if (train_init == "both" && train_levels.empty())
      return finish(f0lab_train_all(cfg.get()), "train");
    std::vector<std::string> kinds;
    if (train_init == "both") {
      kinds = {"random", "auto_associative"};
    } else {
      kinds = {train_init};
    }
    if (train_levels.empty()) {
      // all configured levels: fall back to train_all only when both kinds
      // are wanted; otherwise read the list from the config
      char buf[256];
      if (f0lab_config_get(cfg.get(), "snr_levels", buf, sizeof buf) != F0LAB_OK)
        return finish(F0LAB_ERR_INTERNAL, "train");
      std::string s(buf);
      size_t pos = 0;
      while (pos <= s.size()) {
        const size_t comma = s.find(',', pos);
        const std::string item =
            s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) train_levels.push_back(std::strtod(item.c_str(), nullptr));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
    for (const auto& kind : kinds)
      for (double level : train_levels) {
        const f0lab_status st = f0lab_train(cfg.get(), kind.c_str(), level);
        if (st != F0LAB_OK) return finish(st, "train");
        std::printf("train: %s at %g dB done\n", kind.c_str(), level);
      }
    return 0;
  }
  if (eval->parsed()) return finish(f0lab_eval(cfg.get()), "eval");
  if (report->parsed()) return finish(f0lab_report(cfg.get()), "report");
  if (contour->parsed())
    return finish(f0lab_contour(cfg.get(), contour_utt.c_str(), contour_level,
                                contour_systems.empty() ? nullptr : contour_systems.c_str()),
                  "contour");
  if (runall->parsed()) return finish(f0lab_run_all(cfg.get()), "run-all");
  return 1;
}
