#include "segbed/segbed.h"

#include "core/audio.hpp"
#include "core/beats.hpp"
#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/evaluation.hpp"
#include "core/model.hpp"
#include "core/sampling.hpp"
#include "core/segmentation.hpp"
#include "core/store.hpp"
#include "core/synth.hpp"
#include "core/timeline.hpp"
#include "core/train.hpp"

#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

thread_local std::string g_last_error;

int code_of(const segbed::Error& e) {
    using segbed::ErrorCode;
    switch (e.code()) {
        case ErrorCode::io_failure: return SEGBED_ERR_IO;
        case ErrorCode::unsupported_format: return SEGBED_ERR_UNSUPPORTED_FORMAT;
        case ErrorCode::empty_audio: return SEGBED_ERR_EMPTY_AUDIO;
        case ErrorCode::invalid_argument: return SEGBED_ERR_INVALID_ARGUMENT;
        case ErrorCode::out_of_range: return SEGBED_ERR_OUT_OF_RANGE;
        case ErrorCode::shape_mismatch: return SEGBED_ERR_SHAPE_MISMATCH;
        case ErrorCode::corrupt_manifest: return SEGBED_ERR_CORRUPT_MANIFEST;
        case ErrorCode::checksum_mismatch: return SEGBED_ERR_CHECKSUM_MISMATCH;
        case ErrorCode::arch_mismatch: return SEGBED_ERR_ARCH_MISMATCH;
        case ErrorCode::parse_error: return SEGBED_ERR_PARSE;
        case ErrorCode::overlapping_segments: return SEGBED_ERR_OVERLAP;
        case ErrorCode::gap_between_segments: return SEGBED_ERR_GAP;
        case ErrorCode::empty_dataset: return SEGBED_ERR_EMPTY_DATASET;
        case ErrorCode::non_finite_loss: return SEGBED_ERR_NON_FINITE_LOSS;
        case ErrorCode::empty_negative_region:
            return SEGBED_ERR_EMPTY_NEGATIVE_REGION;
        case ErrorCode::too_few_beats: return SEGBED_ERR_TOO_FEW_BEATS;
        case ErrorCode::unknown_config_key: return SEGBED_ERR_UNKNOWN_KEY;
        case ErrorCode::internal: return SEGBED_ERR_INTERNAL;
    }
    return SEGBED_ERR_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return SEGBED_OK;
    } catch (const segbed::Error& e) {
        g_last_error = e.what();
        return code_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SEGBED_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SEGBED_ERR_INTERNAL;
    }
}

int invalid(const char* message) {
    g_last_error = message;
    return SEGBED_ERR_INVALID_ARGUMENT;
}

} // namespace

struct segbed_config {
    segbed::PipelineConfig cfg;
};
struct segbed_audio {
    segbed::AudioBuffer buffer;
};
struct segbed_beats {
    segbed::BeatGrid grid;
};
struct segbed_store {
    segbed::FeatureStore store;
};
struct segbed_model {
    segbed::EmbeddingModel model;
};
struct segbed_embedding {
    segbed::EmbeddingSequence seq;
};
struct segbed_boundaries {
    segbed::BoundarySet bounds;
    std::vector<double> times;
};
struct segbed_annotations {
    segbed::AnnotationSet ann;
    std::vector<double> boundaries;
};
struct segbed_timeline {
    segbed::SegmentTimeline timeline;
};
struct segbed_report {
    double window_sec = 3.0;
    std::vector<segbed::TrackEvaluation> tracks;
};

extern "C" {

const char* segbed_status_name(int status) {
    switch (status) {
        case SEGBED_OK: return "ok";
        case SEGBED_ERR_IO: return "io_failure";
        case SEGBED_ERR_UNSUPPORTED_FORMAT: return "unsupported_format";
        case SEGBED_ERR_EMPTY_AUDIO: return "empty_audio";
        case SEGBED_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case SEGBED_ERR_OUT_OF_RANGE: return "out_of_range";
        case SEGBED_ERR_SHAPE_MISMATCH: return "shape_mismatch";
        case SEGBED_ERR_CORRUPT_MANIFEST: return "corrupt_manifest";
        case SEGBED_ERR_CHECKSUM_MISMATCH: return "checksum_mismatch";
        case SEGBED_ERR_ARCH_MISMATCH: return "arch_mismatch";
        case SEGBED_ERR_PARSE: return "parse_error";
        case SEGBED_ERR_OVERLAP: return "overlapping_segments";
        case SEGBED_ERR_GAP: return "gap_between_segments";
        case SEGBED_ERR_EMPTY_DATASET: return "empty_dataset";
        case SEGBED_ERR_NON_FINITE_LOSS: return "non_finite_loss";
        case SEGBED_ERR_EMPTY_NEGATIVE_REGION: return "empty_negative_region";
        case SEGBED_ERR_TOO_FEW_BEATS: return "too_few_beats";
        case SEGBED_ERR_UNKNOWN_KEY: return "unknown_config_key";
        default: return "internal";
    }
}

const char* segbed_last_error(void) { return g_last_error.c_str(); }

const char* segbed_version(void) { return "1.0.0"; }

/* config */

segbed_config* segbed_config_new(void) { return new segbed_config(); }

void segbed_config_free(segbed_config* cfg) { delete cfg; }

int segbed_config_set(segbed_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return invalid("null argument");
    return guarded([&] { cfg->cfg.set(key, value); });
}

int segbed_config_get(const segbed_config* cfg, const char* key, char* buf,
                      size_t buf_size) {
    if (!cfg || !key || !buf) return invalid("null argument");
    return guarded([&] {
        const std::string value = cfg->cfg.get(key);
        if (value.size() + 1 > buf_size) {
            segbed::raise(segbed::ErrorCode::invalid_argument,
                          "buffer too small");
        }
        std::memcpy(buf, value.c_str(), value.size() + 1);
    });
}

int segbed_config_load_file(segbed_config* cfg, const char* path) {
    if (!cfg || !path) return invalid("null argument");
    return guarded([&] { cfg->cfg.load_file(path); });
}

int segbed_config_format(const segbed_config* cfg, char* buf, size_t buf_size,
                         size_t* length) {
    if (!cfg) return invalid("null config");
    return guarded([&] {
        const std::string text = cfg->cfg.dump();
        if (length) *length = text.size() + 1;
        if (buf) {
            if (text.size() + 1 > buf_size) {
                segbed::raise(segbed::ErrorCode::invalid_argument,
                              "buffer too small");
            }
            std::memcpy(buf, text.c_str(), text.size() + 1);
        }
    });
}

/* audio */

int segbed_audio_load(const char* path, int target_rate, segbed_audio** out) {
    if (!path || !out) return invalid("null argument");
    return guarded([&] {
        *out = new segbed_audio{segbed::load_audio(path, target_rate)};
    });
}

int segbed_audio_from_samples(const float* samples, size_t count,
                              int source_rate, int target_rate,
                              segbed_audio** out) {
    if (!samples || !out) return invalid("null argument");
    return guarded([&] {
        std::vector<float> copy(samples, samples + count);
        *out = new segbed_audio{
            segbed::audio_from_samples(std::move(copy), source_rate,
                                       target_rate)};
    });
}

size_t segbed_audio_length(const segbed_audio* audio) {
    return audio ? audio->buffer.samples.size() : 0;
}

int segbed_audio_rate(const segbed_audio* audio) {
    return audio ? audio->buffer.sample_rate : 0;
}

const float* segbed_audio_samples(const segbed_audio* audio) {
    return audio ? audio->buffer.samples.data() : nullptr;
}

void segbed_audio_free(segbed_audio* audio) { delete audio; }

/* beats */

int segbed_track_beats(const segbed_audio* audio, segbed_beats** out) {
    if (!audio || !out) return invalid("null argument");
    return guarded([&] {
        *out = new segbed_beats{segbed::track_beats(audio->buffer)};
    });
}

int segbed_beats_load(const char* path, segbed_beats** out) {
    if (!path || !out) return invalid("null argument");
    return guarded([&] {
        *out = new segbed_beats{segbed::read_beats_file(path)};
    });
}

size_t segbed_beats_count(const segbed_beats* beats) {
    return beats ? beats->grid.count() : 0;
}

const double* segbed_beats_times(const segbed_beats* beats) {
    return beats ? beats->grid.beat_times.data() : nullptr;
}

void segbed_beats_free(segbed_beats* beats) { delete beats; }

/* feature store */

int segbed_store_build(const segbed_audio* audio, const segbed_beats* beats,
                       const segbed_config* cfg, const char* track_id,
                       segbed_store** out) {
    if (!audio || !beats || !cfg || !track_id || !out) {
        return invalid("null argument");
    }
    return guarded([&] {
        *out = new segbed_store{
            segbed::build_store(audio->buffer, beats->grid, cfg->cfg.cqt(),
                                cfg->cfg.patch(), track_id)};
    });
}

int segbed_store_save(const segbed_store* store, const char* dataset_dir) {
    if (!store || !dataset_dir) return invalid("null argument");
    return guarded([&] { segbed::save_store(store->store, dataset_dir); });
}

int segbed_store_open(const char* track_dir, segbed_store** out) {
    if (!track_dir || !out) return invalid("null argument");
    return guarded([&] {
        *out = new segbed_store{segbed::load_store(track_dir)};
    });
}

const char* segbed_store_track_id(const segbed_store* store) {
    return store ? store->store.track_id().c_str() : "";
}

size_t segbed_store_beat_count(const segbed_store* store) {
    return store ? store->store.beat_count() : 0;
}

int segbed_store_beats(const segbed_store* store, segbed_beats** out) {
    if (!store || !out) return invalid("null argument");
    return guarded([&] {
        segbed::BeatGrid grid;
        grid.beat_times = store->store.beat_times();
        *out = new segbed_beats{std::move(grid)};
    });
}

void segbed_store_free(segbed_store* store) { delete store; }

/* training */

int segbed_train(const char* const* store_dirs, size_t n_stores,
                 const segbed_config* cfg, const char* sampler, uint64_t seed,
                 int jobs, const char* loss_csv, const char* triplet_log,
                 int verbose, segbed_model** out) {
    if (!store_dirs || !cfg || !sampler || !out) {
        return invalid("null argument");
    }
    segbed::SamplerKind kind;
    if (std::strcmp(sampler, "unbiased") == 0) {
        kind = segbed::SamplerKind::unbiased;
    } else if (std::strcmp(sampler, "biased") == 0) {
        kind = segbed::SamplerKind::biased;
    } else {
        return invalid("sampler must be 'unbiased' or 'biased'");
    }
    return guarded([&] {
        std::vector<segbed::FeatureStore> stores;
        stores.reserve(n_stores);
        for (size_t i = 0; i < n_stores; ++i) {
            stores.push_back(segbed::load_store(store_dirs[i]));
        }
        // warnings always reach stderr; per-epoch progress only with verbose
        std::function<void(const std::string&)> info =
            [verbose](const std::string& m) {
                if (verbose || m.rfind("epoch ", 0) != 0) {
                    std::cerr << "[segbed] " << m << "\n";
                }
            };
        auto result = segbed::train(stores, kind, cfg->cfg.train(seed, jobs),
                                    cfg->cfg.arch(),
                                    loss_csv ? loss_csv : "",
                                    triplet_log ? triplet_log : "", info);
        *out = new segbed_model{std::move(result.model)};
    });
}

int segbed_model_save(const segbed_model* model, const char* path) {
    if (!model || !path) return invalid("null argument");
    return guarded([&] { segbed::save_model(model->model, path); });
}

int segbed_model_load(const char* path, segbed_model** out) {
    if (!path || !out) return invalid("null argument");
    return guarded([&] {
        *out = new segbed_model{segbed::load_model(path)};
    });
}

int segbed_model_embedding_dim(const segbed_model* model) {
    return model ? model->model.arch().embedding_dim : 0;
}

void segbed_model_free(segbed_model* model) { delete model; }

/* embedding */

int segbed_embed(const segbed_model* model, const segbed_store* store,
                 int jobs, segbed_embedding** out) {
    if (!model || !store || !out) return invalid("null argument");
    return guarded([&] {
        *out = new segbed_embedding{
            segbed::embed_track(model->model, store->store, jobs)};
    });
}

int segbed_embed_raw_mean(const segbed_store* store, segbed_embedding** out) {
    if (!store || !out) return invalid("null argument");
    return guarded([&] {
        *out = new segbed_embedding{segbed::raw_mean_embedding(store->store)};
    });
}

size_t segbed_embedding_count(const segbed_embedding* emb) {
    return emb ? emb->seq.count : 0;
}

size_t segbed_embedding_dim(const segbed_embedding* emb) {
    return emb ? emb->seq.dim : 0;
}

const float* segbed_embedding_row(const segbed_embedding* emb, size_t index) {
    if (!emb || index >= emb->seq.count) return nullptr;
    return emb->seq.row(index);
}

void segbed_embedding_free(segbed_embedding* emb) { delete emb; }

/* segmentation */

int segbed_segment(const segbed_embedding* emb, const segbed_beats* beats,
                   const segbed_config* cfg, const char* dump_base,
                   segbed_boundaries** out) {
    if (!emb || !beats || !cfg || !out) return invalid("null argument");
    return guarded([&] {
        auto result = segbed::segment_track(emb->seq, beats->grid,
                                            cfg->cfg.segmentation());
        if (dump_base) {
            segbed::write_ssm(result.ssm_filtered,
                              std::string(dump_base) + ".ssm");
            segbed::write_novelty_csv(result.curve,
                                      std::string(dump_base) + ".novelty.csv");
        }
        *out = new segbed_boundaries{std::move(result.boundaries),
                                     std::move(result.boundary_times)};
    });
}

size_t segbed_boundaries_count(const segbed_boundaries* bounds) {
    return bounds ? bounds->bounds.beat_indices.size() : 0;
}

int segbed_boundaries_get(const segbed_boundaries* bounds, size_t index,
                          size_t* beat_index, double* time_sec) {
    if (!bounds || index >= bounds->bounds.beat_indices.size()) {
        return invalid("boundary index out of range");
    }
    if (beat_index) *beat_index = bounds->bounds.beat_indices[index];
    if (time_sec) *time_sec = bounds->times[index];
    return SEGBED_OK;
}

int segbed_boundaries_write_csv(const segbed_boundaries* bounds,
                                const char* path) {
    if (!bounds || !path) return invalid("null argument");
    return guarded([&] {
        segbed::write_boundaries_csv(bounds->bounds, bounds->times, path);
    });
}

int segbed_boundaries_load_csv(const char* path, segbed_boundaries** out) {
    if (!path || !out) return invalid("null argument");
    return guarded([&] {
        auto* b = new segbed_boundaries();
        try {
            segbed::read_boundaries_csv(path, b->bounds, b->times);
        } catch (...) {
            delete b;
            throw;
        }
        *out = b;
    });
}

void segbed_boundaries_free(segbed_boundaries* bounds) { delete bounds; }

/* evaluation */

int segbed_annotations_load(const char* path, segbed_annotations** out) {
    if (!path || !out) return invalid("null argument");
    return guarded([&] {
        auto ann = segbed::parse_annotations(path);
        auto boundaries = ann.boundaries_sec();
        *out = new segbed_annotations{std::move(ann), std::move(boundaries)};
    });
}

double segbed_annotations_duration(const segbed_annotations* ann) {
    return ann ? ann->ann.duration_sec : 0.0;
}

size_t segbed_annotations_boundary_count(const segbed_annotations* ann) {
    return ann ? ann->boundaries.size() : 0;
}

const double* segbed_annotations_boundaries(const segbed_annotations* ann) {
    return ann ? ann->boundaries.data() : nullptr;
}

void segbed_annotations_free(segbed_annotations* ann) { delete ann; }

int segbed_eval_boundaries(const double* est, size_t n_est, const double* ref,
                           size_t n_ref, double duration_sec,
                           double window_sec, segbed_metrics* out) {
    if ((!est && n_est > 0) || (!ref && n_ref > 0) || !out) {
        return invalid("null argument");
    }
    return guarded([&] {
        const std::vector<double> est_v(est, est + n_est);
        const std::vector<double> ref_v(ref, ref + n_ref);
        const auto m = segbed::hit_rate(
            segbed::trim_boundaries(est_v, duration_sec),
            segbed::trim_boundaries(ref_v, duration_sec), window_sec);
        out->f_measure = m.f_measure;
        out->precision = m.precision;
        out->recall = m.recall;
        out->window_sec = m.window_sec;
        out->n_hits = m.n_hits;
        out->n_est = m.n_est;
        out->n_ref = m.n_ref;
    });
}

segbed_report* segbed_report_new(double window_sec) {
    auto* r = new segbed_report();
    r->window_sec = window_sec;
    return r;
}

int segbed_report_add(segbed_report* report, const char* track_id,
                      const segbed_metrics* metrics) {
    if (!report || !track_id || !metrics) return invalid("null argument");
    segbed::TrackEvaluation t;
    t.track_id = track_id;
    t.metrics.f_measure = metrics->f_measure;
    t.metrics.precision = metrics->precision;
    t.metrics.recall = metrics->recall;
    t.metrics.window_sec = metrics->window_sec;
    t.metrics.n_hits = metrics->n_hits;
    t.metrics.n_est = metrics->n_est;
    t.metrics.n_ref = metrics->n_ref;
    report->tracks.push_back(std::move(t));
    return SEGBED_OK;
}

int segbed_report_add_error(segbed_report* report, const char* track_id,
                            const char* message) {
    if (!report || !track_id || !message) return invalid("null argument");
    segbed::TrackEvaluation t;
    t.track_id = track_id;
    t.ok = false;
    t.error = message;
    report->tracks.push_back(std::move(t));
    return SEGBED_OK;
}

int segbed_report_finish(segbed_report* report, const char* json_path,
                         segbed_metrics* mean_out, segbed_metrics* std_out) {
    if (!report || !json_path) return invalid("null argument");
    return guarded([&] {
        const auto aggregated =
            segbed::evaluate_corpus(report->tracks, report->window_sec);
        segbed::write_report_json(aggregated, json_path);
        if (mean_out) {
            *mean_out = segbed_metrics{};
            mean_out->f_measure = aggregated.mean_f;
            mean_out->precision = aggregated.mean_p;
            mean_out->recall = aggregated.mean_r;
            mean_out->window_sec = aggregated.window_sec;
        }
        if (std_out) {
            *std_out = segbed_metrics{};
            std_out->f_measure = aggregated.std_f;
            std_out->precision = aggregated.std_p;
            std_out->recall = aggregated.std_r;
            std_out->window_sec = aggregated.window_sec;
        }
    });
}

void segbed_report_free(segbed_report* report) { delete report; }

/* sampling statistics */

double segbed_fp_probability(long segment_len, int delta_p, int clamp) {
    try {
        return segbed::fp_probability(segment_len, delta_p, clamp != 0);
    } catch (const segbed::Error& e) {
        g_last_error = e.what();
        return -1.0;
    }
}

int segbed_timeline_synth(int n_segments, long min_len, long max_len,
                          int n_labels, uint64_t seed, segbed_timeline** out) {
    if (!out) return invalid("null output");
    return guarded([&] {
        segbed::Rng rng(seed);
        *out = new segbed_timeline{
            segbed::synth_timeline(n_segments, min_len, max_len, n_labels,
                                   rng)};
    });
}

long segbed_timeline_beats(const segbed_timeline* timeline) {
    return timeline ? timeline->timeline.total_beats : 0;
}

int segbed_fn_probability(const segbed_timeline* timeline,
                          size_t segment_index, int delta_n_min, int clamp,
                          double* out) {
    if (!timeline || !out) return invalid("null argument");
    return guarded([&] {
        segbed::SamplingParams p;
        p.delta_n_min = delta_n_min;
        *out = segbed::fn_probability(timeline->timeline, segment_index, p,
                                      clamp != 0);
    });
}

int segbed_monte_carlo_rates(const segbed_timeline* timeline, int delta_p,
                             int delta_n_min, int delta_n_max, int biased,
                             long trials, uint64_t seed, long anchor_margin,
                             double* fp_rate, double* fn_rate) {
    if (!timeline || !fp_rate || !fn_rate) return invalid("null argument");
    return guarded([&] {
        segbed::SamplingParams p;
        p.delta_p = delta_p;
        p.delta_n_min = delta_n_min;
        p.delta_n_max = delta_n_max;
        segbed::Rng rng(seed);
        const auto rates = segbed::monte_carlo_rates(
            timeline->timeline, p, biased != 0, trials, rng, anchor_margin);
        *fp_rate = rates.fp_rate;
        *fn_rate = rates.fn_rate;
    });
}

void segbed_timeline_free(segbed_timeline* timeline) { delete timeline; }

int segbed_fpfn_run(const int* delta_p_grid, size_t n_delta_p,
                    const int* delta_n_min_grid, size_t n_delta_n_min,
                    const int* delta_n_max_grid, size_t n_delta_n_max,
                    int n_segments, long seg_len_min, long seg_len_max,
                    int n_labels, long trials, uint64_t seed, int biased,
                    const char* csv_path) {
    if (!delta_p_grid || !delta_n_min_grid || !delta_n_max_grid || !csv_path ||
        n_delta_p == 0 || n_delta_n_min == 0 || n_delta_n_max == 0) {
        return invalid("bad fpfn arguments");
    }
    return guarded([&] {
        segbed::Rng timeline_rng(seed);
        const segbed::SegmentTimeline timeline = segbed::synth_timeline(
            n_segments, seg_len_min, seg_len_max, n_labels, timeline_rng);
        const double total =
            static_cast<double>(timeline.total_beats);

        std::ofstream csv(csv_path, std::ios::trunc);
        if (!csv) {
            segbed::raise(segbed::ErrorCode::io_failure,
                          std::string("cannot write ") + csv_path);
        }
        csv << "delta_p,delta_n_min,delta_n_max,fp_formula,fp_empirical,"
               "fn_formula,fn_empirical,flags\n";
        csv.precision(9);

        segbed::Rng mc_rng(seed ^ 0x5DEECE66Dull);
        for (size_t ip = 0; ip < n_delta_p; ++ip) {
            for (size_t imin = 0; imin < n_delta_n_min; ++imin) {
                for (size_t imax = 0; imax < n_delta_n_max; ++imax) {
                    segbed::SamplingParams p;
                    p.delta_p = delta_p_grid[ip];
                    p.delta_n_min = delta_n_min_grid[imin];
                    p.delta_n_max = delta_n_max_grid[imax];
                    p.validate();

                    // length-weighted closed forms over the timeline
                    double fp_formula = 0.0, fn_formula = 0.0;
                    bool fp_out = false, fn_out = false;
                    for (std::size_t s = 0; s < timeline.segments.size(); ++s) {
                        const double w =
                            static_cast<double>(
                                timeline.segments[s].length()) /
                            total;
                        const double fp = segbed::fp_probability(
                            timeline.segments[s].length(), p.delta_p, false);
                        const double fn = segbed::fn_probability(timeline, s,
                                                                 p, false);
                        if (fp < 0.0 || fp > 1.0) fp_out = true;
                        if (fn < 0.0 || fn > 1.0) fn_out = true;
                        fp_formula += w * fp;
                        fn_formula += w * fn;
                    }
                    if (fp_formula < 0.0 || fp_formula > 1.0) fp_out = true;
                    if (fn_formula < 0.0 || fn_formula > 1.0) fn_out = true;

                    const auto rates = segbed::monte_carlo_rates(
                        timeline, p, biased != 0, trials, mc_rng, 0);

                    std::string flags;
                    if (fp_out) flags += "fp_formula_out_of_range";
                    if (fn_out) {
                        if (!flags.empty()) flags += ';';
                        flags += "fn_formula_out_of_range";
                    }
                    csv << p.delta_p << ',' << p.delta_n_min << ','
                        << p.delta_n_max << ',' << fp_formula << ','
                        << rates.fp_rate << ',' << fn_formula << ','
                        << rates.fn_rate << ',' << flags << '\n';
                }
            }
        }
    });
}

/* synthetic corpus */

int segbed_synth_corpus(const char* out_dir, int n_tracks, uint64_t seed,
                        int n_segments_min, int n_segments_max,
                        int seg_len_min_beats, int seg_len_max_beats,
                        int n_textures_min, int n_textures_max,
                        double tempo_bpm, int sample_rate) {
    if (!out_dir) return invalid("null output dir");
    return guarded([&] {
        segbed::SynthParams params;
        params.n_segments_min = n_segments_min;
        params.n_segments_max = n_segments_max;
        params.seg_len_min_beats = seg_len_min_beats;
        params.seg_len_max_beats = seg_len_max_beats;
        params.n_textures_min = n_textures_min;
        params.n_textures_max = n_textures_max;
        params.tempo_bpm = tempo_bpm;
        params.sample_rate = sample_rate;
        segbed::synth_corpus(out_dir, n_tracks, seed, params);
    });
}

} // extern "C"
