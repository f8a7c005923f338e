/* segbed — music structure segmentation via unsupervised feature embeddings.
 *
 * C API of the shared library. All functions return a segbed_status (0 on
 * success); segbed_last_error() describes the most recent failure on the
 * calling thread. Objects are opaque handles released with their _free
 * function. Pointers returned by accessors stay valid until their owning
 * handle is freed. Distinct handles may be used concurrently; a single
 * handle must not be mutated from two threads.
 */

#ifndef SEGBED_H
#define SEGBED_H

#include <stddef.h>
#include <stdint.h>

#if defined _WIN32 || defined __CYGWIN__
#define SEGBED_API __declspec(dllexport)
#else
#define SEGBED_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum segbed_status {
    SEGBED_OK = 0,
    SEGBED_ERR_IO = 1,
    SEGBED_ERR_UNSUPPORTED_FORMAT = 2,
    SEGBED_ERR_EMPTY_AUDIO = 3,
    SEGBED_ERR_INVALID_ARGUMENT = 4,
    SEGBED_ERR_OUT_OF_RANGE = 5,
    SEGBED_ERR_SHAPE_MISMATCH = 6,
    SEGBED_ERR_CORRUPT_MANIFEST = 7,
    SEGBED_ERR_CHECKSUM_MISMATCH = 8,
    SEGBED_ERR_ARCH_MISMATCH = 9,
    SEGBED_ERR_PARSE = 10,
    SEGBED_ERR_OVERLAP = 11,
    SEGBED_ERR_GAP = 12,
    SEGBED_ERR_EMPTY_DATASET = 13,
    SEGBED_ERR_NON_FINITE_LOSS = 14,
    SEGBED_ERR_EMPTY_NEGATIVE_REGION = 15,
    SEGBED_ERR_TOO_FEW_BEATS = 16,
    SEGBED_ERR_UNKNOWN_KEY = 17,
    SEGBED_ERR_INTERNAL = 18
} segbed_status;

SEGBED_API const char* segbed_status_name(int status);
/* Thread-local message for the last failing call on this thread. */
SEGBED_API const char* segbed_last_error(void);
SEGBED_API const char* segbed_version(void);

/* ---------------------------------------------------------------- config */

typedef struct segbed_config segbed_config;

SEGBED_API segbed_config* segbed_config_new(void);
SEGBED_API void segbed_config_free(segbed_config* cfg);
SEGBED_API int segbed_config_set(segbed_config* cfg, const char* key,
                                 const char* value);
/* Copies the value into buf (NUL-terminated); fails if buf is too small. */
SEGBED_API int segbed_config_get(const segbed_config* cfg, const char* key,
                                 char* buf, size_t buf_size);
SEGBED_API int segbed_config_load_file(segbed_config* cfg, const char* path);
/* Full `key = value` dump. Two-call pattern: pass buf = NULL to query the
 * required size (including the terminating NUL) via *length. */
SEGBED_API int segbed_config_format(const segbed_config* cfg, char* buf,
                                    size_t buf_size, size_t* length);

/* ----------------------------------------------------------------- audio */

typedef struct segbed_audio segbed_audio;

SEGBED_API int segbed_audio_load(const char* path, int target_rate,
                                 segbed_audio** out);
SEGBED_API int segbed_audio_from_samples(const float* samples, size_t count,
                                         int source_rate, int target_rate,
                                         segbed_audio** out);
SEGBED_API size_t segbed_audio_length(const segbed_audio* audio);
SEGBED_API int segbed_audio_rate(const segbed_audio* audio);
SEGBED_API const float* segbed_audio_samples(const segbed_audio* audio);
SEGBED_API void segbed_audio_free(segbed_audio* audio);

/* ----------------------------------------------------------------- beats */

typedef struct segbed_beats segbed_beats;

SEGBED_API int segbed_track_beats(const segbed_audio* audio,
                                  segbed_beats** out);
/* One beat time (seconds) per line. */
SEGBED_API int segbed_beats_load(const char* path, segbed_beats** out);
SEGBED_API size_t segbed_beats_count(const segbed_beats* beats);
SEGBED_API const double* segbed_beats_times(const segbed_beats* beats);
SEGBED_API void segbed_beats_free(segbed_beats* beats);

/* --------------------------------------------------------- feature store */

typedef struct segbed_store segbed_store;

SEGBED_API int segbed_store_build(const segbed_audio* audio,
                                  const segbed_beats* beats,
                                  const segbed_config* cfg,
                                  const char* track_id, segbed_store** out);
/* Writes <dataset_dir>/<track_id>/{manifest.json, cqt.f32}. */
SEGBED_API int segbed_store_save(const segbed_store* store,
                                 const char* dataset_dir);
SEGBED_API int segbed_store_open(const char* track_dir, segbed_store** out);
SEGBED_API const char* segbed_store_track_id(const segbed_store* store);
SEGBED_API size_t segbed_store_beat_count(const segbed_store* store);
/* The store's beat grid as a standalone handle. */
SEGBED_API int segbed_store_beats(const segbed_store* store,
                                  segbed_beats** out);
SEGBED_API void segbed_store_free(segbed_store* store);

/* -------------------------------------------------------------- training */

typedef struct segbed_model segbed_model;

/* sampler: "unbiased" or "biased". Optional CSV outputs: loss_csv
 * (epoch,mean_loss,wall_sec) and triplet_log
 * (epoch,batch,track_id,anchor,positive,negative); pass NULL to skip. */
SEGBED_API int segbed_train(const char* const* store_dirs, size_t n_stores,
                            const segbed_config* cfg, const char* sampler,
                            uint64_t seed, int jobs, const char* loss_csv,
                            const char* triplet_log, int verbose,
                            segbed_model** out);
SEGBED_API int segbed_model_save(const segbed_model* model, const char* path);
SEGBED_API int segbed_model_load(const char* path, segbed_model** out);
SEGBED_API int segbed_model_embedding_dim(const segbed_model* model);
SEGBED_API void segbed_model_free(segbed_model* model);

/* ------------------------------------------------------------- embedding */

typedef struct segbed_embedding segbed_embedding;

SEGBED_API int segbed_embed(const segbed_model* model,
                            const segbed_store* store, int jobs,
                            segbed_embedding** out);
/* Unembedded baseline: per-beat patches mean-pooled over time. */
SEGBED_API int segbed_embed_raw_mean(const segbed_store* store,
                                     segbed_embedding** out);
SEGBED_API size_t segbed_embedding_count(const segbed_embedding* emb);
SEGBED_API size_t segbed_embedding_dim(const segbed_embedding* emb);
SEGBED_API const float* segbed_embedding_row(const segbed_embedding* emb,
                                             size_t index);
SEGBED_API void segbed_embedding_free(segbed_embedding* emb);

/* ---------------------------------------------------------- segmentation */

typedef struct segbed_boundaries segbed_boundaries;

/* Runs SSM -> median filter -> checkerboard novelty -> peak picking with
 * the config's segmentation parameters. When dump_base is non-NULL, writes
 * <dump_base>.ssm.f32/.ssm.json and <dump_base>.novelty.csv. */
SEGBED_API int segbed_segment(const segbed_embedding* emb,
                              const segbed_beats* beats,
                              const segbed_config* cfg, const char* dump_base,
                              segbed_boundaries** out);
SEGBED_API size_t segbed_boundaries_count(const segbed_boundaries* bounds);
SEGBED_API int segbed_boundaries_get(const segbed_boundaries* bounds,
                                     size_t index, size_t* beat_index,
                                     double* time_sec);
/* CSV `beat_index,time_sec` with a header row. */
SEGBED_API int segbed_boundaries_write_csv(const segbed_boundaries* bounds,
                                           const char* path);
SEGBED_API int segbed_boundaries_load_csv(const char* path,
                                          segbed_boundaries** out);
SEGBED_API void segbed_boundaries_free(segbed_boundaries* bounds);

/* ------------------------------------------------------------ evaluation */

typedef struct segbed_annotations segbed_annotations;

typedef struct segbed_metrics {
    double f_measure;
    double precision;
    double recall;
    double window_sec;
    size_t n_hits;
    size_t n_est;
    size_t n_ref;
} segbed_metrics;

/* TSV `start<TAB>end<TAB>label` rows in seconds. */
SEGBED_API int segbed_annotations_load(const char* path,
                                       segbed_annotations** out);
SEGBED_API double segbed_annotations_duration(const segbed_annotations* ann);
SEGBED_API size_t segbed_annotations_boundary_count(
    const segbed_annotations* ann);
SEGBED_API const double* segbed_annotations_boundaries(
    const segbed_annotations* ann);
SEGBED_API void segbed_annotations_free(segbed_annotations* ann);

/* Trims both lists (0.5 s at the track edges) and computes the maximum
 * one-to-one matching at the tolerance window. */
SEGBED_API int segbed_eval_boundaries(const double* est, size_t n_est,
                                      const double* ref, size_t n_ref,
                                      double duration_sec, double window_sec,
                                      segbed_metrics* out);

typedef struct segbed_report segbed_report;

SEGBED_API segbed_report* segbed_report_new(double window_sec);
SEGBED_API int segbed_report_add(segbed_report* report, const char* track_id,
                                 const segbed_metrics* metrics);
SEGBED_API int segbed_report_add_error(segbed_report* report,
                                       const char* track_id,
                                       const char* message);
/* Aggregates (mean and population std of F, P, R) and writes the JSON
 * report. mean_out/std_out may be NULL; their f_measure/precision/recall
 * fields carry the aggregated values. */
SEGBED_API int segbed_report_finish(segbed_report* report,
                                    const char* json_path,
                                    segbed_metrics* mean_out,
                                    segbed_metrics* std_out);
SEGBED_API void segbed_report_free(segbed_report* report);

/* ---------------------------------------------- sampling statistics (fpfn) */

typedef struct segbed_timeline segbed_timeline;

/* Closed-form probability that the positive example leaves the anchor's
 * segment (evaluated verbatim; exceeds 1 for short segments unless
 * clamp != 0). */
SEGBED_API double segbed_fp_probability(long segment_len, int delta_p,
                                        int clamp);

SEGBED_API int segbed_timeline_synth(int n_segments, long min_len,
                                     long max_len, int n_labels,
                                     uint64_t seed, segbed_timeline** out);
SEGBED_API long segbed_timeline_beats(const segbed_timeline* timeline);
SEGBED_API int segbed_fn_probability(const segbed_timeline* timeline,
                                     size_t segment_index, int delta_n_min,
                                     int clamp, double* out);
/* Monte Carlo FP/FN rates with the unbiased or (oracle-sided) biased
 * sampler; anchors restricted to [margin, L-1-margin]. */
SEGBED_API int segbed_monte_carlo_rates(const segbed_timeline* timeline,
                                        int delta_p, int delta_n_min,
                                        int delta_n_max, int biased,
                                        long trials, uint64_t seed,
                                        long anchor_margin, double* fp_rate,
                                        double* fn_rate);
SEGBED_API void segbed_timeline_free(segbed_timeline* timeline);

/* Formula-vs-Monte-Carlo sweep written as CSV with columns
 * delta_p,delta_n_min,delta_n_max,fp_formula,fp_empirical,fn_formula,
 * fn_empirical,flags. Formula columns are length-weighted averages over the
 * timeline's segments; flags marks closed-form values outside [0,1]. The
 * grids are arrays of candidate values; every combination is one row. */
SEGBED_API int segbed_fpfn_run(const int* delta_p_grid, size_t n_delta_p,
                               const int* delta_n_min_grid, size_t n_delta_n_min,
                               const int* delta_n_max_grid, size_t n_delta_n_max,
                               int n_segments, long seg_len_min,
                               long seg_len_max, int n_labels, long trials,
                               uint64_t seed, int biased, const char* csv_path);

/* ------------------------------------------------------ synthetic corpus */

/* Writes track_NNN.wav (PCM16) + track_NNN.tsv annotation pairs. */
SEGBED_API int segbed_synth_corpus(const char* out_dir, int n_tracks,
                                   uint64_t seed, int n_segments_min,
                                   int n_segments_max, int seg_len_min_beats,
                                   int seg_len_max_beats, int n_textures_min,
                                   int n_textures_max, double tempo_bpm,
                                   int sample_rate);

#ifdef __cplusplus
}
#endif

#endif /* SEGBED_H */
