/*
 * C interface to the rboss library: dataset loading, grid and randomised
 * BOSS ensembles, checkpoint resume and resampled experiments.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return an rboss_status; on failure
 * rboss_last_error() describes the problem (per thread, until the next
 * failing call).
 */
#ifndef RBOSS_RBOSS_H_
#define RBOSS_RBOSS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RBOSS_API __declspec(dllexport)
#else
#define RBOSS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rboss_status {
  RBOSS_OK = 0,
  RBOSS_ERR_INVALID_ARGUMENT = 1,
  RBOSS_ERR_FORMAT = 2,
  RBOSS_ERR_STRATIFICATION = 3,
  RBOSS_ERR_POLICY = 4,
  RBOSS_ERR_PARAMETER = 5,
  RBOSS_ERR_ESTIMATE = 6,
  RBOSS_ERR_BUILD = 7,
  RBOSS_ERR_CONFIG = 8,
  RBOSS_ERR_SPEC = 9,
  RBOSS_ERR_CHECKPOINT = 10,
  RBOSS_ERR_NOT_FOUND = 11,
  RBOSS_ERR_VERSION = 12,
  RBOSS_ERR_DATASET_MISMATCH = 13,
  RBOSS_ERR_INTERNAL = 99
} rboss_status;

typedef struct rboss_dataset rboss_dataset;
typedef struct rboss_ensemble rboss_ensemble;

RBOSS_API const char* rboss_version(void);
RBOSS_API const char* rboss_status_string(rboss_status status);
RBOSS_API const char* rboss_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

RBOSS_API rboss_status rboss_dataset_load(const char* path,
                                          rboss_dataset** out);
RBOSS_API rboss_status rboss_dataset_parse(const char* text, size_t length,
                                           rboss_dataset** out);
/* spec: "n=30,m=128,pattern=16,counts=1:4,noise=0.5[,amplitude=1]" */
RBOSS_API rboss_status rboss_dataset_synthetic(const char* spec, uint64_t seed,
                                               rboss_dataset** out);
RBOSS_API void rboss_dataset_free(rboss_dataset* data);

RBOSS_API size_t rboss_dataset_size(const rboss_dataset* data);
RBOSS_API size_t rboss_dataset_length(const rboss_dataset* data);
RBOSS_API int rboss_dataset_class_count(const rboss_dataset* data);
RBOSS_API rboss_status rboss_dataset_instance(const rboss_dataset* data,
                                              size_t index,
                                              const double** values,
                                              int* label);

/* Stratified split; both outputs are new handles. */
RBOSS_API rboss_status rboss_dataset_resample(const rboss_dataset* data,
                                              double train_fraction,
                                              uint64_t seed,
                                              rboss_dataset** train,
                                              rboss_dataset** test);

/* ---- configuration ------------------------------------------------------ */

typedef enum rboss_subsample_kind {
  RBOSS_SUBSAMPLE_NONE = 0,
  RBOSS_SUBSAMPLE_FRACTION = 1,
  RBOSS_SUBSAMPLE_MAX_TOTAL = 2
} rboss_subsample_kind;

typedef enum rboss_estimate_kind {
  RBOSS_ESTIMATE_NONE = 0,
  RBOSS_ESTIMATE_FULL_LOOCV = 1,
  RBOSS_ESTIMATE_FAST_LOOCV = 2
} rboss_estimate_kind;

typedef struct rboss_config {
  uint64_t ensemble_size;     /* parameter sets to try; 0 when contracted */
  uint64_t max_ensemble_size; /* 0 = unbounded */
  double time_budget_seconds; /* negative = no contract */
  uint64_t member_cap;        /* default 500 */
  int subsample_kind;         /* rboss_subsample_kind */
  double subsample_fraction;
  uint64_t subsample_max_total;
  int use_cawpe;
  double cawpe_exponent;      /* default 4 */
  int estimate_kind;          /* rboss_estimate_kind */
  uint64_t fast_per_class;    /* default 50 */
  uint64_t seed;
  const char* checkpoint_path; /* NULL = no checkpointing */
  uint64_t checkpoint_every;   /* members between checkpoints, default 1 */
} rboss_config;

/* k = 100, unbounded, no estimate, no subsample, no CAWPE. */
RBOSS_API void rboss_config_init(rboss_config* cfg);
/* Fills `cfg` from a named preset. Grid presets return RBOSS_ERR_CONFIG;
 * use rboss_variant_is_grid() first. */
RBOSS_API rboss_status rboss_config_preset(const char* variant,
                                           rboss_config* cfg);
RBOSS_API int rboss_variant_is_grid(const char* variant);
RBOSS_API size_t rboss_variant_count(void);
RBOSS_API const char* rboss_variant_name(size_t index);

/* ---- ensembles ---------------------------------------------------------- */

typedef struct rboss_member_info {
  int word_length;
  int alphabet_size;
  int window_length;
  int normalize;
  int has_accuracy;
  double train_accuracy;
  double weight;
  size_t train_size;
  uint32_t parameter_id;
  uint64_t build_ordinal;
} rboss_member_info;

RBOSS_API rboss_status rboss_build_grid(const rboss_dataset* train,
                                        double retention,
                                        rboss_ensemble** out);
RBOSS_API rboss_status rboss_build(const rboss_dataset* train,
                                   const rboss_config* cfg,
                                   rboss_ensemble** out);
/* Continues the build stored in `checkpoint_path`, using its configuration. */
RBOSS_API rboss_status rboss_resume(const rboss_dataset* train,
                                    const char* checkpoint_path,
                                    rboss_ensemble** out);
RBOSS_API void rboss_ensemble_free(rboss_ensemble* model);

RBOSS_API size_t rboss_ensemble_member_count(const rboss_ensemble* model);
RBOSS_API rboss_status rboss_ensemble_member(const rboss_ensemble* model,
                                             size_t index,
                                             rboss_member_info* out);
RBOSS_API double rboss_ensemble_build_seconds(const rboss_ensemble* model);
RBOSS_API size_t rboss_ensemble_params_tried(const rboss_ensemble* model);

/* `probabilities` may be NULL; otherwise it must hold class_count values. */
RBOSS_API rboss_status rboss_predict(const rboss_ensemble* model,
                                     const double* series, size_t length,
                                     int* label, double* probabilities,
                                     size_t probabilities_length);

/* ---- experiments -------------------------------------------------------- */

typedef struct rboss_arm {
  const char* variant; /* output name */
  int grid;
  double grid_retention; /* <= 0 selects 0.92 */
  rboss_config config;   /* ignored for grid arms; seed set per resample */
} rboss_arm;

typedef struct rboss_experiment {
  const char* data_path;      /* exactly one of data_path and synthetic_spec */
  const char* synthetic_spec;
  uint64_t synthetic_seed;
  const char* dataset_name;   /* NULL: file stem or "synthetic" */
  const rboss_arm* arms;
  size_t arm_count;
  uint64_t resamples;
  uint64_t base_seed;
  double train_fraction;
  const char* out_dir;
  const char* checkpoint_path; /* NULL = off; suffixed per variant/resample */
  uint64_t checkpoint_every;
} rboss_experiment;

typedef struct rboss_experiment_report {
  uint64_t records;
  uint64_t failures;
} rboss_experiment_report;

RBOSS_API rboss_status rboss_experiment_run(const rboss_experiment* exp,
                                            rboss_experiment_report* report);

#ifdef __cplusplus
}
#endif

#endif /* RBOSS_RBOSS_H_ */
