/*
 * C interface to the multi-view fuzzy representation learner.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an mvfs_status;
 * on failure mvfs_last_error() describes the problem for the calling thread.
 */
#ifndef MVFS_MVFS_H
#define MVFS_MVFS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MVFS_BUILDING_LIBRARY)
#    define MVFS_API __declspec(dllexport)
#  else
#    define MVFS_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__) && __GNUC__ >= 4
#  define MVFS_API __attribute__((visibility("default")))
#else
#  define MVFS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mvfs_status {
    MVFS_OK = 0,
    MVFS_ERR_INVALID_ARGUMENT = 1,
    MVFS_ERR_PARSE = 2,
    MVFS_ERR_LOAD = 3,
    MVFS_ERR_IO = 4,
    MVFS_ERR_NUMERIC = 5,
    MVFS_ERR_INVALID_STATE = 6,
    MVFS_ERR_INTERNAL = 7
} mvfs_status;

typedef enum mvfs_b_mode { MVFS_B_PAPER = 0, MVFS_B_EXACT = 1 } mvfs_b_mode;

typedef enum mvfs_variant {
    MVFS_VARIANT_FULL = 0,
    MVFS_VARIANT_COMMON_ONLY = 1,
    MVFS_VARIANT_NO_CONSISTENCY = 2
} mvfs_variant;

typedef struct mvfs_hyperparams {
    double alpha;
    double beta;
    double gamma;
    double delta;
    int32_t rules;
    int32_t dim;      /* 0: number of classes */
    int32_t max_iter;
    int32_t knn;
    double bandwidth; /* <= 0: median kNN distance */
    double eps_irls;
    double tol_stop;
    uint64_t seed;
    int32_t b_mode;   /* mvfs_b_mode */
    int32_t variant;  /* mvfs_variant */
} mvfs_hyperparams;

typedef struct mvfs_eval_options {
    int32_t repeats;
    int32_t restarts;
    uint64_t seed;
    int32_t clusters; /* 0: number of classes */
    int32_t refit;    /* non-zero: refit the model for every repeat */
} mvfs_eval_options;

typedef struct mvfs_metric {
    double mean;
    double std;
    double min;
    double max;
} mvfs_metric;

typedef struct mvfs_scores {
    mvfs_metric nmi;
    mvfs_metric acc;
    mvfs_metric purity;
} mvfs_scores;

/* Objective breakdown of one trace entry. */
typedef struct mvfs_trace_entry {
    int32_t iteration;
    double total;
    double graph;
    double orthogonality;
    double consistency;
    double b_sparsity;
    double pc_sparsity;
    double ps_sparsity;
    double entropy;
} mvfs_trace_entry;

typedef struct mvfs_synth_params {
    int32_t instances;
    int32_t views;
    int32_t clusters;
    double noise;
    uint64_t seed;
    double separation;
    const int32_t* dims; /* NULL or `views` feature counts */
} mvfs_synth_params;

typedef struct mvfs_dataset mvfs_dataset;
typedef struct mvfs_model mvfs_model;

MVFS_API const char* mvfs_version(void);
MVFS_API const char* mvfs_last_error(void);
MVFS_API const char* mvfs_status_name(mvfs_status status);

MVFS_API void mvfs_hyperparams_default(mvfs_hyperparams* hp);
MVFS_API void mvfs_eval_options_default(mvfs_eval_options* options);
MVFS_API void mvfs_synth_params_default(mvfs_synth_params* params);

/* Datasets */
MVFS_API mvfs_status mvfs_dataset_load(const char* const* view_paths, size_t view_count, const char* label_path,
                                       int has_header, mvfs_dataset** out);
/* Views as row-major blocks; labels may be NULL. */
MVFS_API mvfs_status mvfs_dataset_from_arrays(const double* const* views, const size_t* dims, size_t view_count,
                                              size_t instances, const int32_t* labels, mvfs_dataset** out);
MVFS_API mvfs_status mvfs_synth(const mvfs_synth_params* params, mvfs_dataset** out);
/* Writes view<k>.csv and labels.csv into `dir`. */
MVFS_API mvfs_status mvfs_dataset_write(const mvfs_dataset* dataset, const char* dir);
MVFS_API void mvfs_dataset_free(mvfs_dataset* dataset);
MVFS_API size_t mvfs_dataset_instances(const mvfs_dataset* dataset);
MVFS_API size_t mvfs_dataset_views(const mvfs_dataset* dataset);
MVFS_API size_t mvfs_dataset_view_dim(const mvfs_dataset* dataset, size_t view);
MVFS_API size_t mvfs_dataset_classes(const mvfs_dataset* dataset);

/* Models */
MVFS_API mvfs_status mvfs_fit(const mvfs_dataset* dataset, const mvfs_hyperparams* hp, mvfs_model** out);
MVFS_API void mvfs_model_free(mvfs_model* model);
MVFS_API mvfs_status mvfs_model_save(const mvfs_model* model, const char* path);
MVFS_API mvfs_status mvfs_model_load(const char* path, mvfs_model** out);
MVFS_API mvfs_status mvfs_model_hyperparams(const mvfs_model* model, mvfs_hyperparams* out);
MVFS_API size_t mvfs_model_trace_length(const mvfs_model* model);
MVFS_API mvfs_status mvfs_model_trace_entry(const mvfs_model* model, size_t index, mvfs_trace_entry* out);
MVFS_API mvfs_status mvfs_model_write_trace(const mvfs_model* model, const char* csv_path);
MVFS_API size_t mvfs_model_weight_count(const mvfs_model* model);
MVFS_API double mvfs_model_weight(const mvfs_model* model, size_t view);
MVFS_API size_t mvfs_model_warning_count(const mvfs_model* model);
MVFS_API const char* mvfs_model_warning(const mvfs_model* model, size_t index);

/* Embedding: N rows by dim * (views + 1) columns, row-major into `out`. */
MVFS_API mvfs_status mvfs_embed_shape(const mvfs_model* model, const mvfs_dataset* dataset, size_t* rows,
                                      size_t* cols);
MVFS_API mvfs_status mvfs_embed(const mvfs_model* model, const mvfs_dataset* dataset, double* out, size_t capacity);
MVFS_API mvfs_status mvfs_embed_write(const mvfs_model* model, const mvfs_dataset* dataset, const char* csv_path);

/* Rules: text listing and structured JSON; either path may be NULL. */
MVFS_API mvfs_status mvfs_export_rules(const mvfs_model* model, const char* text_path, const char* json_path);

/* Evaluation: K-means on the embedding, NMI/ACC/Purity over repeats. */
MVFS_API mvfs_status mvfs_evaluate(const mvfs_model* model, const mvfs_dataset* dataset,
                                   const mvfs_eval_options* options, const char* report_path, mvfs_scores* out);

/* Grid over the four regularisation weights; NULL/0 lists mean 2^-5..2^5. */
MVFS_API mvfs_status mvfs_grid_search(const mvfs_dataset* dataset, const mvfs_hyperparams* base,
                                      const double* alphas, size_t n_alphas, const double* betas, size_t n_betas,
                                      const double* gammas, size_t n_gammas, const double* deltas, size_t n_deltas,
                                      const mvfs_eval_options* options, int32_t threads, const char* csv_path,
                                      const char* summary_path);

/* Full, common-only and no-consistency variants on one dataset. Writes
 * ablation.csv, ablation.txt and trace_<variant>.csv into `out_dir`. */
MVFS_API mvfs_status mvfs_ablate(const mvfs_dataset* dataset, const mvfs_hyperparams* hp,
                                 const mvfs_eval_options* options, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* MVFS_MVFS_H */
