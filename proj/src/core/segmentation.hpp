#pragma once

#include "beats.hpp"
#include "model.hpp"

#include <string>
#include <vector>

namespace segbed {

// Pairwise squared Euclidean distances between per-beat feature vectors.
struct SelfSimilarityMatrix {
    std::size_t size = 0;
    bool filtered = false;
    std::vector<float> values; // size x size, symmetric, zero diagonal

    float at(std::size_t i, std::size_t j) const {
        return values[i * size + j];
    }
};

// Foote-style checkerboard: g[i,j] = sgn(i) sgn(j) exp(-(i^2+j^2) / sigma)
// on [-kappa, kappa]^2, zeroed where |i| <= 1 or |j| <= 1 (and sgn(0) = 0).
// The radial taper pairs (i,j) with (-i,j) antisymmetrically, so the total
// sum is zero and a constant matrix produces zero response.
struct CheckerboardKernel {
    int kappa = 40;
    double sigma = 18.5;
    std::vector<double> values; // (2k+1) x (2k+1)

    double at(int i, int j) const {
        const int w = 2 * kappa + 1;
        return values[static_cast<std::size_t>((i + kappa) * w + (j + kappa))];
    }
    double sum() const;
};

struct NoveltyCurve {
    std::vector<double> values; // length L, >= 0
};

struct BoundarySet {
    std::vector<std::size_t> beat_indices; // strictly increasing
};

SelfSimilarityMatrix compute_ssm(const EmbeddingSequence& emb);

// w x w median filter anchored at rows [i - ceil(w/2) + 1, i + floor(w/2)],
// shrinking at the matrix edges; an even cell count takes the midpoint of
// the two middle order statistics.
SelfSimilarityMatrix median_filter(const SelfSimilarityMatrix& ssm, int window);

CheckerboardKernel build_kernel(int kappa, double sigma);

// Correlate the kernel along the diagonal (out-of-range entries replicate
// the matrix edge). On a distance SSM the raw response is strongly negative
// at segment boundaries, so the returned curve is [-eta]_+: nonnegative with
// peaks at the boundaries.
NoveltyCurve novelty(const SelfSimilarityMatrix& ssm,
                     const CheckerboardKernel& kernel);

// Peaks whose value-to-local-mean ratio exceeds the threshold. A plateau of
// equal values counts once, at its center index; the mean window clips at
// the curve edges and uses the actual window length. Windows summing to
// zero yield no peak.
BoundarySet pick_peaks(const NoveltyCurve& curve, int half_window,
                       double threshold);

std::vector<double> boundaries_to_times(const BoundarySet& bounds,
                                        const BeatGrid& beats);

// Whole detector: SSM -> median filter -> novelty -> peaks.
struct SegmentationParams {
    int median_window = 8;
    int kappa = 40;
    double sigma = 18.5;
    int peak_half_window = 10;  // T
    double peak_threshold = 1.35; // tau
};

struct SegmentationResult {
    SelfSimilarityMatrix ssm_filtered;
    NoveltyCurve curve;
    BoundarySet boundaries;
    std::vector<double> boundary_times;
};

SegmentationResult segment_track(const EmbeddingSequence& emb,
                                 const BeatGrid& beats,
                                 const SegmentationParams& params);

// Exports: raw little-endian float32 matrix with a JSON sidecar; boundary
// and novelty CSVs.
void write_ssm(const SelfSimilarityMatrix& ssm, const std::string& base_path);
void write_novelty_csv(const NoveltyCurve& curve, const std::string& path);
void write_boundaries_csv(const BoundarySet& bounds,
                          const std::vector<double>& times,
                          const std::string& path);
// Boundary CSV reader (beat_index,time_sec with a header line).
void read_boundaries_csv(const std::string& path, BoundarySet& bounds,
                         std::vector<double>& times);

} // namespace segbed
