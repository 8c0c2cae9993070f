#include "f0lab.h"

#include <cstring>
#include <exception>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "lstm.hpp"

using namespace f0lab;

// The handle is just the C++ config; the pipeline state lives on disk.
struct f0lab_config {
  ExperimentConfig impl;
};

namespace {

thread_local std::string g_last_error = "";

f0lab_status fail(f0lab_status code, const char* what) {
  g_last_error = what ? what : "unknown error";
  return code;
}

template <typename Fn>
f0lab_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(F0LAB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const IoError& e) {
    return fail(F0LAB_ERR_IO, e.what());
  } catch (const NumericError& e) {
    return fail(F0LAB_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(F0LAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(F0LAB_ERR_INTERNAL, "unknown exception");
  }
}

f0lab_status require(const void* p, const char* name) {
  if (p) return F0LAB_OK;
  return fail(F0LAB_ERR_INVALID_ARGUMENT, (std::string(name) + " is NULL").c_str());
}

}  // namespace

extern "C" {

const char* f0lab_version(void) { return "f0lab 1.0.0"; }

const char* f0lab_last_error(void) { return g_last_error.c_str(); }

f0lab_config* f0lab_config_new(void) {
  try {
    return new f0lab_config();
  } catch (...) {
    return nullptr;
  }
}

void f0lab_config_free(f0lab_config* cfg) { delete cfg; }

f0lab_status f0lab_config_set(f0lab_config* cfg, const char* key, const char* value) {
  if (require(cfg, "cfg") || require(key, "key") || require(value, "value"))
    return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    cfg->impl.set(key, value);
    return F0LAB_OK;
  });
}

f0lab_status f0lab_config_get(const f0lab_config* cfg, const char* key, char* buf, size_t buflen) {
  if (require(cfg, "cfg") || require(key, "key") || require(buf, "buf"))
    return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const std::string v = cfg->impl.get(key);
    if (v.size() + 1 > buflen)
      return fail(F0LAB_ERR_BUFFER_TOO_SMALL,
                  ("value for '" + std::string(key) + "' needs " + std::to_string(v.size() + 1) +
                   " bytes")
                      .c_str());
    std::memcpy(buf, v.c_str(), v.size() + 1);
    return F0LAB_OK;
  });
}

f0lab_status f0lab_config_load_file(f0lab_config* cfg, const char* path) {
  if (require(cfg, "cfg") || require(path, "path")) return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    cfg->impl.load_file(path);
    return F0LAB_OK;
  });
}

f0lab_status f0lab_gen_corpus(const f0lab_config* cfg) {
  if (require(cfg, "cfg")) return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    ensure_corpus(cfg->impl);
    return F0LAB_OK;
  });
}

f0lab_status f0lab_pretrain(const f0lab_config* cfg) {
  if (require(cfg, "cfg")) return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    op_pretrain(cfg->impl);
    return F0LAB_OK;
  });
}

f0lab_status f0lab_train(const f0lab_config* cfg, const char* init_kind, double snr_db) {
  if (require(cfg, "cfg") || require(init_kind, "init_kind")) return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    op_train_cell(cfg->impl, init_kind,
                  cfg->impl.train_mode == "pooled" ? "pooled" : snr_label(snr_db));
    return F0LAB_OK;
  });
}

f0lab_status f0lab_train_all(const f0lab_config* cfg) {
  if (require(cfg, "cfg")) return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&]() -> f0lab_status {
    const auto summaries = op_train_all(cfg->impl);
    for (const auto& s : summaries)
      if (s.status != "completed") return fail(F0LAB_ERR_INCOMPLETE, s.error.c_str());
    return F0LAB_OK;
  });
}

f0lab_status f0lab_eval(const f0lab_config* cfg) {
  if (require(cfg, "cfg")) return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    op_eval(cfg->impl);
    return F0LAB_OK;
  });
}

f0lab_status f0lab_report(const f0lab_config* cfg) {
  if (require(cfg, "cfg")) return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    op_report(cfg->impl);
    return F0LAB_OK;
  });
}

f0lab_status f0lab_contour(const f0lab_config* cfg, const char* utterance_id, double snr_db,
                           const char* systems_csv) {
  if (require(cfg, "cfg") || require(utterance_id, "utterance_id"))
    return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    std::vector<std::string> systems;
    if (systems_csv && *systems_csv) {
      std::string s(systems_csv), item;
      size_t pos = 0;
      while (pos <= s.size()) {
        const size_t comma = s.find(',', pos);
        item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) systems.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    } else {
      systems = cfg->impl.systems;
    }
    op_contour(cfg->impl, utterance_id, snr_db, systems);
    return F0LAB_OK;
  });
}

f0lab_status f0lab_run_all(const f0lab_config* cfg) {
  if (require(cfg, "cfg")) return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&]() -> f0lab_status {
    const RunManifest manifest = op_run_all(cfg->impl);
    if (manifest.incomplete) {
      std::string detail = "run incomplete";
      for (const auto& c : manifest.cells)
        if (c.status != "completed") detail += "; " + c.error;
      if (manifest.pretrain.status != "completed" && !manifest.pretrain.error.empty())
        detail += "; " + manifest.pretrain.error;
      return fail(F0LAB_ERR_INCOMPLETE, detail.c_str());
    }
    return F0LAB_OK;
  });
}

f0lab_status f0lab_check_gradients(int input_dim, const int* hidden, size_t n_hidden,
                                   int output_dim, unsigned long long seed,
                                   double* max_rel_error) {
  if (require(hidden, "hidden") || require(max_rel_error, "max_rel_error"))
    return F0LAB_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    ArchSpec arch;
    arch.input_dim = input_dim;
    arch.hidden.assign(hidden, hidden + n_hidden);
    arch.output_dim = output_dim;
    *max_rel_error = check_gradients(arch, seed);
    return F0LAB_OK;
  });
}

}  // extern "C"
