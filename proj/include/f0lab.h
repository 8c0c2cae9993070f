/*
 * f0lab — fundamental frequency detection in noisy speech with LSTM
 * denoising autoencoders and auto-associative initialization.
 *
 * C interface to the shared library. All state lives behind the opaque
 * f0lab_config handle plus the files a run writes under its output
 * directory; every entry point returns a status code and leaves a
 * human-readable message readable via f0lab_last_error() on failure.
 */
#ifndef F0LAB_H
#define F0LAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum f0lab_status {
  F0LAB_OK = 0,
  F0LAB_ERR_INVALID_ARGUMENT = 1,
  F0LAB_ERR_IO = 2,
  F0LAB_ERR_NUMERIC = 3,
  F0LAB_ERR_BUFFER_TOO_SMALL = 4,
  F0LAB_ERR_INTERNAL = 5,
  F0LAB_ERR_INCOMPLETE = 6 /* some cells failed; completed artifacts kept */
} f0lab_status;

typedef struct f0lab_config f0lab_config;

const char* f0lab_version(void);

/* Message from the most recent failing call on this thread. Never NULL. */
const char* f0lab_last_error(void);

/* Configuration handle with desk-scale defaults. Keys are documented in the
 * README; unknown keys and unparsable values yield
 * F0LAB_ERR_INVALID_ARGUMENT. */
f0lab_config* f0lab_config_new(void);
void f0lab_config_free(f0lab_config* cfg);
f0lab_status f0lab_config_set(f0lab_config* cfg, const char* key, const char* value);
f0lab_status f0lab_config_get(const f0lab_config* cfg, const char* key, char* buf, size_t buflen);
/* Loads `key = value` lines; '#' starts a comment. */
f0lab_status f0lab_config_load_file(f0lab_config* cfg, const char* path);

/* Pipeline stages. Artifacts are read and written under the configured
 * output directory; stages compose, e.g. gen_corpus -> pretrain -> train ->
 * eval -> report. */
f0lab_status f0lab_gen_corpus(const f0lab_config* cfg);
f0lab_status f0lab_pretrain(const f0lab_config* cfg);
/* init_kind: "random" | "auto_associative". */
f0lab_status f0lab_train(const f0lab_config* cfg, const char* init_kind, double snr_db);
f0lab_status f0lab_train_all(const f0lab_config* cfg);
f0lab_status f0lab_eval(const f0lab_config* cfg);
f0lab_status f0lab_report(const f0lab_config* cfg);
/* systems_csv: comma-separated subset of "None,LSTM,LSTM-AA". */
f0lab_status f0lab_contour(const f0lab_config* cfg, const char* utterance_id, double snr_db,
                           const char* systems_csv);
/* The whole protocol. Returns F0LAB_ERR_INCOMPLETE when any cell failed. */
f0lab_status f0lab_run_all(const f0lab_config* cfg);

/* Gradient-checker entry point (finite-difference validation of the BPTT
 * implementation): writes the max relative error for a small architecture
 * into *max_rel_error. */
f0lab_status f0lab_check_gradients(int input_dim, const int* hidden, size_t n_hidden,
                                   int output_dim, unsigned long long seed,
                                   double* max_rel_error);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* F0LAB_H */
