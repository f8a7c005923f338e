#include "store.hpp"

#include "errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "store tensors are little-endian");

namespace segbed {

namespace fs = std::filesystem;
using nlohmann::json;

void PatchConfig::validate() const {
    if (beats < 2 || beats % 2 != 0) {
        raise(ErrorCode::invalid_argument,
              "patch beats must be even and >= 2");
    }
    if (subdivisions < 1 || bins < 1) {
        raise(ErrorCode::invalid_argument, "bad patch configuration");
    }
}

float log_compress(float magnitude) {
    return std::log(magnitude + 1e-6f);
}

std::vector<double> subdivision_centers(const BeatGrid& beats,
                                        int subdivisions) {
    const std::size_t L = beats.count();
    if (L < 2) {
        raise(ErrorCode::too_few_beats,
              "need at least two beats to subdivide");
    }
    if (subdivisions < 1) {
        raise(ErrorCode::invalid_argument, "subdivisions must be >= 1");
    }
    const int R = subdivisions;
    std::vector<double> centers;
    centers.reserve(L * static_cast<std::size_t>(R));
    for (std::size_t i = 0; i + 1 < L; ++i) {
        const double b = beats.beat_times[i];
        const double interval = beats.beat_times[i + 1] - b;
        for (int r = 0; r < R; ++r) {
            centers.push_back(b + r * interval / R);
        }
    }
    // Extrapolate past the last beat with the final interval so every beat
    // index owns a full row range.
    const double last = beats.beat_times[L - 1];
    const double interval = last - beats.beat_times[L - 2];
    for (int r = 0; r < R; ++r) {
        centers.push_back(last + r * interval / R);
    }
    return centers;
}

FeatureStore::FeatureStore(std::string track_id, PatchConfig config,
                           std::vector<double> beat_times,
                           std::vector<float> rows)
    : track_id_(std::move(track_id)),
      config_(config),
      beat_times_(std::move(beat_times)),
      rows_(std::move(rows)) {
    config_.validate();
    const std::size_t expected = beat_times_.size() *
                                 static_cast<std::size_t>(config_.subdivisions) *
                                 static_cast<std::size_t>(config_.bins);
    if (rows_.size() != expected) {
        raise(ErrorCode::shape_mismatch, "store tensor size mismatch");
    }
    row_count_ = beat_times_.size() *
                 static_cast<std::size_t>(config_.subdivisions);
}

const float* FeatureStore::row(long r) const {
    const long max_row = static_cast<long>(row_count_) - 1;
    const long clamped = std::clamp(r, 0L, max_row);
    return rows_.data() +
           static_cast<std::size_t>(clamped) *
               static_cast<std::size_t>(config_.bins);
}

void FeatureStore::fill_patch(std::size_t beat_index, float* out) const {
    if (beat_index >= beat_count()) {
        raise(ErrorCode::out_of_range, "patch beat index out of range");
    }
    const int K = config_.bins;
    const int Q = config_.rows();
    const long anchor = static_cast<long>(beat_index) * config_.subdivisions;
    for (int q = 0; q < Q; ++q) {
        const long r = anchor - Q / 2 + q;
        std::memcpy(out + static_cast<std::size_t>(q) * K, row(r),
                    sizeof(float) * static_cast<std::size_t>(K));
    }
}

Patch FeatureStore::patch(std::size_t beat_index) const {
    Patch p;
    p.center_beat = beat_index;
    p.rows = config_.rows();
    p.cols = config_.bins;
    p.values.resize(static_cast<std::size_t>(p.rows) * p.cols);
    fill_patch(beat_index, p.values.data());
    return p;
}

std::vector<float> FeatureStore::beat_segment(long center_beat,
                                              int n_beats) const {
    const int K = config_.bins;
    const int R = config_.subdivisions;
    const long n_rows = static_cast<long>(n_beats) * R;
    std::vector<float> out(static_cast<std::size_t>(n_rows) * K);
    const long anchor = center_beat * R;
    for (long q = 0; q < n_rows; ++q) {
        const long r = anchor - n_rows / 2 + q;
        std::memcpy(out.data() + static_cast<std::size_t>(q) * K, row(r),
                    sizeof(float) * static_cast<std::size_t>(K));
    }
    return out;
}

FeatureStore build_store(const AudioBuffer& audio, const BeatGrid& beats,
                         const CqtParams& cqt, const PatchConfig& patch,
                         const std::string& track_id) {
    PatchConfig cfg = patch;
    cfg.bins = cqt.bins();
    cfg.validate();
    const std::vector<double> centers =
        subdivision_centers(beats, cfg.subdivisions);
    // Beat extrapolation may step slightly past the end of the audio; those
    // frames are analyzed against the zero-padded tail.
    std::vector<double> clamped = centers;
    const double duration = audio.duration_sec();
    for (double& c : clamped) c = std::min(c, duration);
    CqtMatrix m = cqt_at_times(audio, cqt, clamped);
    for (float& v : m.magnitudes) v = log_compress(v);
    return FeatureStore(track_id, cfg, beats.beat_times,
                        std::move(m.magnitudes));
}

std::string save_store(const FeatureStore& store,
                       const std::string& dataset_dir) {
    const fs::path dir = fs::path(dataset_dir) / store.track_id();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) raise(ErrorCode::io_failure, "cannot create " + dir.string());

    json manifest;
    manifest["track_id"] = store.track_id();
    manifest["L"] = store.beat_count();
    manifest["K"] = store.config().bins;
    manifest["Q"] = store.config().rows();
    manifest["B"] = store.config().beats;
    manifest["R"] = store.config().subdivisions;
    manifest["beat_times"] = store.beat_times();
    manifest["dtype"] = "float32";
    manifest["byte_order"] = "little";
    manifest["values"] = "log_magnitude";

    {
        std::ofstream mf(dir / "manifest.json", std::ios::trunc);
        if (!mf) raise(ErrorCode::io_failure, "cannot write manifest");
        mf << manifest.dump(2) << "\n";
    }
    {
        std::ofstream tf(dir / "cqt.f32", std::ios::binary | std::ios::trunc);
        if (!tf) raise(ErrorCode::io_failure, "cannot write tensor");
        tf.write(reinterpret_cast<const char*>(store.raw_rows().data()),
                 static_cast<std::streamsize>(store.raw_rows().size() *
                                              sizeof(float)));
        if (!tf) raise(ErrorCode::io_failure, "short tensor write");
    }
    return dir.string();
}

FeatureStore load_store(const std::string& track_dir) {
    const fs::path dir(track_dir);
    json manifest;
    {
        std::ifstream mf(dir / "manifest.json");
        if (!mf) {
            raise(ErrorCode::corrupt_manifest,
                  "missing manifest in " + track_dir);
        }
        try {
            mf >> manifest;
        } catch (const json::exception& e) {
            raise(ErrorCode::corrupt_manifest,
                  track_dir + ": " + e.what());
        }
    }

    PatchConfig cfg;
    std::string track_id;
    std::vector<double> beat_times;
    std::size_t L = 0, Q = 0;
    try {
        track_id = manifest.at("track_id").get<std::string>();
        L = manifest.at("L").get<std::size_t>();
        cfg.bins = manifest.at("K").get<int>();
        Q = manifest.at("Q").get<std::size_t>();
        cfg.beats = manifest.at("B").get<int>();
        cfg.subdivisions = manifest.at("R").get<int>();
        beat_times = manifest.at("beat_times").get<std::vector<double>>();
        const auto dtype = manifest.at("dtype").get<std::string>();
        const auto order = manifest.at("byte_order").get<std::string>();
        if (dtype != "float32" || order != "little") {
            raise(ErrorCode::corrupt_manifest,
                  track_dir + ": unsupported dtype/byte order");
        }
    } catch (const json::exception& e) {
        raise(ErrorCode::corrupt_manifest, track_dir + ": " + e.what());
    }
    if (beat_times.size() != L ||
        Q != static_cast<std::size_t>(cfg.rows())) {
        raise(ErrorCode::corrupt_manifest,
              track_dir + ": inconsistent manifest dimensions");
    }

    std::ifstream tf(dir / "cqt.f32", std::ios::binary | std::ios::ate);
    if (!tf) raise(ErrorCode::io_failure, "missing tensor in " + track_dir);
    const std::streamsize size = tf.tellg();
    const std::size_t expected =
        L * static_cast<std::size_t>(cfg.subdivisions) *
        static_cast<std::size_t>(cfg.bins) * sizeof(float);
    if (static_cast<std::size_t>(size) != expected) {
        raise(ErrorCode::shape_mismatch,
              track_dir + ": tensor size does not match manifest");
    }
    std::vector<float> rows(expected / sizeof(float));
    tf.seekg(0);
    tf.read(reinterpret_cast<char*>(rows.data()), size);
    if (!tf) raise(ErrorCode::io_failure, "short tensor read");

    return FeatureStore(track_id, cfg, std::move(beat_times), std::move(rows));
}

FeatureStore open_store(const std::string& dataset_dir,
                        const std::string& track_id) {
    return load_store((fs::path(dataset_dir) / track_id).string());
}

std::vector<std::string> list_store_dirs(const std::string& dataset_dir) {
    std::vector<std::string> dirs;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dataset_dir, ec)) {
        if (entry.is_directory() &&
            fs::exists(entry.path() / "manifest.json")) {
            dirs.push_back(entry.path().string());
        }
    }
    if (ec) raise(ErrorCode::io_failure, "cannot list " + dataset_dir);
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

} // namespace segbed
