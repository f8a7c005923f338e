#include "segmentation.hpp"

#include "errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace segbed {

double CheckerboardKernel::sum() const {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
}

SelfSimilarityMatrix compute_ssm(const EmbeddingSequence& emb) {
    if (emb.count < 2) {
        raise(ErrorCode::invalid_argument, "need at least two embeddings");
    }
    SelfSimilarityMatrix ssm;
    ssm.size = emb.count;
    ssm.values.assign(ssm.size * ssm.size, 0.0f);
    for (std::size_t i = 0; i < ssm.size; ++i) {
        const float* a = emb.row(i);
        for (std::size_t j = i + 1; j < ssm.size; ++j) {
            const float* b = emb.row(j);
            double acc = 0.0;
            for (std::size_t d = 0; d < emb.dim; ++d) {
                const double diff =
                    static_cast<double>(a[d]) - static_cast<double>(b[d]);
                acc += diff * diff;
            }
            const float v = static_cast<float>(acc);
            ssm.values[i * ssm.size + j] = v;
            ssm.values[j * ssm.size + i] = v; // exact symmetry by mirroring
        }
    }
    return ssm;
}

SelfSimilarityMatrix median_filter(const SelfSimilarityMatrix& ssm,
                                   int window) {
    if (window < 1) raise(ErrorCode::invalid_argument, "window must be >= 1");
    if (window == 1) {
        SelfSimilarityMatrix out = ssm;
        out.filtered = true;
        return out;
    }
    const long n = static_cast<long>(ssm.size);
    const long above = window / 2 - (window % 2 == 0 ? 1 : 0); // ceil(w/2)-1
    const long below = window / 2;                             // floor(w/2)

    SelfSimilarityMatrix out;
    out.size = ssm.size;
    out.filtered = true;
    out.values.resize(ssm.values.size());

    std::vector<float> cell;
    cell.reserve(static_cast<std::size_t>(window) * window);
    for (long i = 0; i < n; ++i) {
        const long r0 = std::max(0L, i - above);
        const long r1 = std::min(n - 1, i + below);
        for (long j = 0; j < n; ++j) {
            const long c0 = std::max(0L, j - above);
            const long c1 = std::min(n - 1, j + below);
            cell.clear();
            for (long r = r0; r <= r1; ++r) {
                const float* row = ssm.values.data() + r * n;
                for (long c = c0; c <= c1; ++c) cell.push_back(row[c]);
            }
            const std::size_t m = cell.size();
            auto mid = cell.begin() + static_cast<long>(m / 2);
            std::nth_element(cell.begin(), mid, cell.end());
            float median = *mid;
            if (m % 2 == 0) {
                const float lower =
                    *std::max_element(cell.begin(), mid);
                median = 0.5f * (median + lower);
            }
            out.values[static_cast<std::size_t>(i) * n + j] = median;
        }
    }
    return out;
}

CheckerboardKernel build_kernel(int kappa, double sigma) {
    if (kappa < 2 || sigma <= 0.0) {
        raise(ErrorCode::invalid_argument, "bad checkerboard kernel parameters");
    }
    CheckerboardKernel k;
    k.kappa = kappa;
    k.sigma = sigma;
    const int w = 2 * kappa + 1;
    k.values.assign(static_cast<std::size_t>(w) * w, 0.0);
    for (int i = -kappa; i <= kappa; ++i) {
        if (std::abs(i) <= 1) continue;
        for (int j = -kappa; j <= kappa; ++j) {
            if (std::abs(j) <= 1) continue;
            const double sign = (i > 0 ? 1.0 : -1.0) * (j > 0 ? 1.0 : -1.0);
            const double r2 = static_cast<double>(i) * i +
                              static_cast<double>(j) * j;
            k.values[static_cast<std::size_t>((i + kappa) * w + (j + kappa))] =
                sign * std::exp(-r2 / sigma);
        }
    }
    return k;
}

NoveltyCurve novelty(const SelfSimilarityMatrix& ssm,
                     const CheckerboardKernel& kernel) {
    const long n = static_cast<long>(ssm.size);
    const int kappa = kernel.kappa;
    if (static_cast<long>(kappa) >= n) {
        raise(ErrorCode::invalid_argument, "kernel wider than the matrix");
    }
    NoveltyCurve curve;
    curve.values.assign(ssm.size, 0.0);
    const int w = 2 * kappa + 1;
    for (long v = 0; v < n; ++v) {
        double acc = 0.0;
        for (int i = -kappa; i <= kappa; ++i) {
            const long r = std::clamp(v + i, 0L, n - 1);
            const float* row = ssm.values.data() + r * n;
            const double* krow =
                kernel.values.data() + static_cast<std::size_t>(i + kappa) * w;
            for (int j = -kappa; j <= kappa; ++j) {
                const long c = std::clamp(v + j, 0L, n - 1);
                acc += krow[j + kappa] * row[c];
            }
        }
        // distances grow across boundaries, so boundary response is negative
        curve.values[static_cast<std::size_t>(v)] = std::max(0.0, -acc);
    }
    return curve;
}

BoundarySet pick_peaks(const NoveltyCurve& curve, int half_window,
                       double threshold) {
    if (half_window < 1 || threshold <= 0.0) {
        raise(ErrorCode::invalid_argument, "bad peak picking parameters");
    }
    const long n = static_cast<long>(curve.values.size());
    BoundarySet out;
    long run_start = 0;
    while (run_start < n) {
        long run_end = run_start;
        while (run_end + 1 < n &&
               curve.values[run_end + 1] == curve.values[run_start]) {
            ++run_end;
        }
        const double v = curve.values[run_start];
        const bool left_ok = run_start == 0 || curve.values[run_start - 1] < v;
        const bool right_ok = run_end == n - 1 || curve.values[run_end + 1] < v;
        if (left_ok && right_ok) {
            const long peak = (run_start + run_end) / 2;
            const long lo = std::max(0L, peak - half_window);
            const long hi = std::min(n - 1, peak + half_window);
            double window_sum = 0.0;
            for (long t = lo; t <= hi; ++t) window_sum += curve.values[t];
            if (window_sum > 0.0) {
                const double ratio =
                    v * static_cast<double>(hi - lo + 1) / window_sum;
                if (ratio > threshold) {
                    out.beat_indices.push_back(static_cast<std::size_t>(peak));
                }
            }
        }
        run_start = run_end + 1;
    }
    return out;
}

std::vector<double> boundaries_to_times(const BoundarySet& bounds,
                                        const BeatGrid& beats) {
    std::vector<double> times;
    times.reserve(bounds.beat_indices.size());
    for (std::size_t idx : bounds.beat_indices) {
        if (idx >= beats.count()) {
            raise(ErrorCode::out_of_range, "boundary index outside beat grid");
        }
        times.push_back(beats.beat_times[idx]);
    }
    return times;
}

SegmentationResult segment_track(const EmbeddingSequence& emb,
                                 const BeatGrid& beats,
                                 const SegmentationParams& params) {
    SegmentationResult result;
    SelfSimilarityMatrix ssm = compute_ssm(emb);
    result.ssm_filtered = median_filter(ssm, params.median_window);
    // cap the kernel so short tracks still run
    const int kappa =
        std::min(params.kappa, static_cast<int>(emb.count) - 1);
    const CheckerboardKernel kernel = build_kernel(std::max(2, kappa),
                                                   params.sigma);
    result.curve = novelty(result.ssm_filtered, kernel);
    result.boundaries =
        pick_peaks(result.curve, params.peak_half_window, params.peak_threshold);
    result.boundary_times = boundaries_to_times(result.boundaries, beats);
    return result;
}

void write_ssm(const SelfSimilarityMatrix& ssm, const std::string& base_path) {
    {
        std::ofstream f(base_path + ".f32", std::ios::binary | std::ios::trunc);
        if (!f) raise(ErrorCode::io_failure, "cannot write " + base_path);
        f.write(reinterpret_cast<const char*>(ssm.values.data()),
                static_cast<std::streamsize>(ssm.values.size() * sizeof(float)));
    }
    nlohmann::json sidecar;
    sidecar["L"] = ssm.size;
    sidecar["filtered"] = ssm.filtered;
    sidecar["dtype"] = "float32";
    sidecar["byte_order"] = "little";
    std::ofstream j(base_path + ".json", std::ios::trunc);
    if (!j) raise(ErrorCode::io_failure, "cannot write sidecar");
    j << sidecar.dump(2) << "\n";
}

void write_novelty_csv(const NoveltyCurve& curve, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) raise(ErrorCode::io_failure, "cannot write " + path);
    f << "beat_index,novelty\n";
    f.precision(9);
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        f << i << ',' << curve.values[i] << '\n';
    }
}

void write_boundaries_csv(const BoundarySet& bounds,
                          const std::vector<double>& times,
                          const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) raise(ErrorCode::io_failure, "cannot write " + path);
    f << "beat_index,time_sec\n";
    f.precision(9);
    for (std::size_t i = 0; i < bounds.beat_indices.size(); ++i) {
        f << bounds.beat_indices[i] << ',' << times[i] << '\n';
    }
}

void read_boundaries_csv(const std::string& path, BoundarySet& bounds,
                         std::vector<double>& times) {
    std::ifstream f(path);
    if (!f) raise(ErrorCode::io_failure, "cannot open " + path);
    bounds.beat_indices.clear();
    times.clear();
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (first) {
            first = false; // header
            continue;
        }
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            raise(ErrorCode::parse_error, path + ": bad boundary row");
        }
        try {
            bounds.beat_indices.push_back(std::stoul(line.substr(0, comma)));
            times.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            raise(ErrorCode::parse_error, path + ": bad boundary row");
        }
    }
}

} // namespace segbed
