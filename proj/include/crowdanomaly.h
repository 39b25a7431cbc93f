/* C API for the crowd anomaly detection library.
 *
 * All functions return a ca_status code; on failure ca_last_error() holds a
 * human-readable message for the calling thread. Handles are opaque and must
 * be released with the matching destroy function.
 */
#ifndef CROWDANOMALY_H
#define CROWDANOMALY_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ca_status {
    CA_OK = 0,
    CA_ERR_USAGE = 1,   /* bad arguments or configuration */
    CA_ERR_DATA = 2,    /* unreadable/inconsistent input data */
    CA_ERR_NUMERIC = 3  /* numerical failure (e.g. degenerate model fit) */
} ca_status;

/* Message for the most recent failure on this thread; empty string if none. */
const char* ca_last_error(void);

const char* ca_version(void);

/* Number of per-frame features (collectiveness, conflict, density, mean speed). */
#define CA_FEATURE_COUNT 4

/* ---- streaming pipeline: grayscale frames in, feature vectors out ---- */

typedef struct ca_pipeline ca_pipeline;

/* config_path may be NULL for defaults. */
ca_status ca_pipeline_create(const char* config_path, int width, int height,
                             ca_pipeline** out);
/* pixels: row-major width*height grayscale. frame_index must increase by 1
 * per call starting at 0. out_valid is 0 when the frame was gated for low
 * activity (features are zero then). */
ca_status ca_pipeline_process(ca_pipeline* p, const unsigned char* pixels, int frame_index,
                              double out_features[CA_FEATURE_COUNT], int* out_valid);
void ca_pipeline_destroy(ca_pipeline* p);

/* ---- trained models ---- */

typedef struct ca_model ca_model;

ca_status ca_model_load(const char* path, ca_model** out);
/* Writes "gmm" or "svm" into buf. */
ca_status ca_model_kind(const ca_model* m, char* buf, size_t buf_size);
/* features: the CA_FEATURE_COUNT raw values; normalization (and feature
 * exclusion, for ablation models) is applied internally. GMM score is the
 * log-probability, SVM score is the signed decision value. */
ca_status ca_model_score(const ca_model* m, const double features[CA_FEATURE_COUNT],
                         double* out_score);
/* out_abnormal: 1 = abnormal, 0 = normal. */
ca_status ca_model_classify(const ca_model* m, const double features[CA_FEATURE_COUNT],
                            int* out_abnormal);
void ca_model_destroy(ca_model* m);

/* ---- file-level workflows (what the CLI exposes) ---- */

/* recipe: "umn-like" or "vf-like". */
ca_status ca_synth(const char* recipe, const char* out_dir, uint64_t seed);

/* format: "pgm_dir", "raw_y8" or "y4m"; width/height only used for raw_y8.
 * Runs the vision front-end and writes a tracklet file. */
ca_status ca_track(const char* video, const char* format, int width, int height,
                   const char* config_path, uint64_t seed, const char* out_tracklets);
/* Tracks every video listed in the corpus manifest, writing <stem>.tracklets
 * next to each video. */
ca_status ca_track_corpus(const char* corpus_dir, const char* config_path, uint64_t seed);

/* Replays a tracklet file into per-frame features (width/height are the frame
 * dimensions the tracklets were produced from). */
ca_status ca_features(const char* tracklets, int width, int height, const char* config_path,
                      uint64_t seed, const char* out_csv);
/* Converts every tracklet file referenced by the corpus manifest into
 * <stem>.features.csv. */
ca_status ca_features_corpus(const char* corpus_dir, const char* config_path, uint64_t seed);

/* Fits the outlier GMM on the valid frames of the given feature CSVs.
 * exclude_feature: -1 for all features, else 0..3 drops that dimension. */
ca_status ca_train_gmm(const char* const* feature_csvs, size_t n, const char* config_path,
                       uint64_t seed, int exclude_feature, const char* model_out);
/* Fits the RBF SVM; labels[i] is the clip label (1 = abnormal) for csv i. */
ca_status ca_train_svm(const char* const* feature_csvs, const int* labels, size_t n,
                       const char* config_path, uint64_t seed, int exclude_feature,
                       const char* model_out);

/* Scores a feature CSV with a saved model; writes frame,valid,score,label. */
ca_status ca_score(const char* model_path, const char* features_csv, const char* out_csv);

/* Frame-level protocol over a rendered corpus (expects <stem>.features.csv
 * per manifest row; run ca_track_corpus + ca_features_corpus first).
 * cross_scene: 0 = train/test within each scene, 1 = train on other scenes.
 * out_prefix (optional) gets <prefix>_roc.csv / <prefix>_roc.svg. */
ca_status ca_eval_umn(const char* corpus_dir, int cross_scene, int train_frames,
                      const char* config_path, uint64_t seed, const char* out_prefix,
                      double* out_auc);

/* Clip-level stratified cross validation; detector is "gmm" or "svm". */
ca_status ca_eval_cv(const char* corpus_dir, const char* detector, int folds,
                     const char* config_path, uint64_t seed, const char* out_csv,
                     double* out_mean_accuracy, double* out_ci95);

/* Leave-one-feature-out SVM cross validation; out_accuracy is indexed by
 * feature (order: collectiveness, conflict, density, mean speed). */
ca_status ca_ablate(const char* corpus_dir, int folds, const char* config_path, uint64_t seed,
                    const char* out_csv, double out_accuracy[CA_FEATURE_COUNT]);

/* End-to-end throughput on synthetic frames generated in memory. */
ca_status ca_bench(int width, int height, int agents, int frames, uint64_t seed,
                   const char* config_path, double* out_fps);

#ifdef __cplusplus
}
#endif

#endif /* CROWDANOMALY_H */
