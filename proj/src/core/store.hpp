#pragma once

#include "audio.hpp"
#include "beats.hpp"
#include "cqt.hpp"

#include <string>
#include <vector>

namespace segbed {

// Patch geometry: a patch covers `beats` beats with `subdivisions` CQT
// frames per beat, so rows() = beats * subdivisions time rows by bins()
// frequency columns.
struct PatchConfig {
    int beats = 16;        // must be even: patches are centered on a beat
    int subdivisions = 8;  // CQT frames per beat
    int bins = 72;

    int rows() const { return beats * subdivisions; }
    void validate() const;
};

// One network input: rows() x bins log-magnitude values, time-major.
struct Patch {
    std::size_t center_beat = 0;
    int rows = 0;
    int cols = 0;
    std::vector<float> values;
};

// Beat subdivision analysis times: for each beat i < L-1 and r < R,
// b_i + r*(b_{i+1}-b_i)/R, plus R extrapolated times after the last beat at
// the final inter-beat interval. Total L*R, strictly increasing when the
// beats are.
std::vector<double> subdivision_centers(const BeatGrid& beats,
                                        int subdivisions);

// Per-track feature store: the log-compressed CQT at every beat subdivision
// (L*R rows by K columns), from which patches are materialized on demand.
class FeatureStore {
public:
    FeatureStore() = default;
    FeatureStore(std::string track_id, PatchConfig config,
                 std::vector<double> beat_times, std::vector<float> rows);

    const std::string& track_id() const { return track_id_; }
    const PatchConfig& config() const { return config_; }
    const std::vector<double>& beat_times() const { return beat_times_; }
    std::size_t beat_count() const { return beat_times_.size(); }
    std::size_t row_count() const { return row_count_; }
    const std::vector<float>& raw_rows() const { return rows_; }

    // Patch centered on beat i: subdivision rows [i*R - Q/2, i*R + Q/2),
    // edge-replicated outside [0, L*R).
    Patch patch(std::size_t beat_index) const;
    void fill_patch(std::size_t beat_index, float* out) const;

    // n_beats*R rows centered on a beat, edge-replicated; feeds the 2D-FFT
    // side comparison (n_beats = 8 there).
    std::vector<float> beat_segment(long center_beat, int n_beats) const;

private:
    const float* row(long r) const; // clamped

    std::string track_id_;
    PatchConfig config_;
    std::vector<double> beat_times_;
    std::vector<float> rows_; // row_count_ x bins
    std::size_t row_count_ = 0;
};

// Build a store from audio: subdivision centers -> CQT -> log compression.
FeatureStore build_store(const AudioBuffer& audio, const BeatGrid& beats,
                         const CqtParams& cqt, const PatchConfig& patch,
                         const std::string& track_id);

// On-disk layout: <dataset_dir>/<track_id>/{manifest.json, cqt.f32} with the
// tensor stored row-major little-endian float32. Round trips are bit-exact.
std::string save_store(const FeatureStore& store,
                       const std::string& dataset_dir);
FeatureStore load_store(const std::string& track_dir);
FeatureStore open_store(const std::string& dataset_dir,
                        const std::string& track_id);

// Track directories (containing manifest.json) under a dataset dir, sorted.
std::vector<std::string> list_store_dirs(const std::string& dataset_dir);

// log(x + 1e-6) compression applied to all magnitudes entering a store.
float log_compress(float magnitude);

} // namespace segbed
