#pragma once

#include "audio.hpp"

#include <cmath>
#include <vector>

namespace segbed {

// Constant-Q analysis configuration. Center frequencies are geometrically
// spaced from f_min; the default quality factor keeps adjacent filters at
// equal-tempered spacing: q = 1 / (2^(1/bins_per_octave) - 1).
struct CqtParams {
    double f_min = 40.0;
    int bins_per_octave = 12;
    int n_octaves = 6;
    double q_factor = 0.0; // <= 0 means derive from bins_per_octave

    int bins() const { return bins_per_octave * n_octaves; }

    double quality() const {
        if (q_factor > 0.0) return q_factor;
        return 1.0 / (std::pow(2.0, 1.0 / bins_per_octave) - 1.0);
    }

    double bin_frequency(int k) const {
        return f_min * std::pow(2.0, static_cast<double>(k) / bins_per_octave);
    }

    void validate(int sample_rate) const;
};

// Frames-by-bins magnitude matrix with explicit frame center times.
struct CqtMatrix {
    int bins = 0;
    std::vector<double> frame_centers; // seconds, strictly increasing
    std::vector<float> magnitudes;     // frames x bins, row-major

    std::size_t frames() const { return frame_centers.size(); }
    const float* row(std::size_t i) const {
        return magnitudes.data() + i * static_cast<std::size_t>(bins);
    }
};

// One frame per requested center time. Direct Hann-windowed complex kernel
// inner products, so centers may be arbitrary (beat subdivisions). Windows
// past the signal edges see zeros. Magnitudes are scaled so a unit-amplitude
// sinusoid at a bin center reads ~1.0 in that bin.
CqtMatrix cqt_at_times(const AudioBuffer& audio, const CqtParams& params,
                       const std::vector<double>& centers);

// Frames at 0, hop, 2*hop, ... <= duration.
CqtMatrix cqt_fixed_hop(const AudioBuffer& audio, const CqtParams& params,
                        double hop_sec);

} // namespace segbed
