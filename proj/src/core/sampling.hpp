#pragma once

#include "rng.hpp"
#include "store.hpp"
#include "timeline.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace segbed {

struct SamplingParams {
    int delta_p = 16;     // positive window half-width, beats
    int delta_n_min = 1;  // negative region inner radius
    int delta_n_max = 96; // negative region outer radius

    void validate() const;
};

struct TripletIndices {
    long anchor = 0;
    long positive = 0;
    long negative = 0;
};

enum class Side { before, after };

// Inclusive index range.
struct IndexRange {
    long lo = 0;
    long hi = -1;

    long count() const { return hi >= lo ? hi - lo + 1 : 0; }
    bool contains(long v) const { return v >= lo && v <= hi; }
};

IndexRange positive_region(long anchor, long total, int delta_p);
// The two clipped negative regions (they may touch or overlap near the track
// edges; duplicated indices are counted once when sampling).
std::pair<IndexRange, IndexRange> negative_regions(long anchor, long total,
                                                   const SamplingParams& p);

// Uniform draw over the deduplicated union of the two regions.
long sample_negative(long anchor, long total, const SamplingParams& p,
                     Rng& rng);

// Positive and negative draws for a given anchor (time-proximity sampling).
TripletIndices sample_triplet_given_anchor(long anchor, long total,
                                           const SamplingParams& p, Rng& rng);
// Full unbiased triplet: anchor uniform over [0, total).
TripletIndices sample_triplet(long total, const SamplingParams& p, Rng& rng);

// 2D-FFT side comparison. Requires anchor-16 >= 0 and anchor+16 <= L-1;
// callers fall back to unbiased sampling otherwise. The side whose two
// probe segments (at +/-4 and +/-16 beats) lie nearer the anchor segment in
// 2D-FFT feature space is assumed to share the anchor's musical segment.
// Ties pick `after`.
bool can_bias(long anchor, long total);
Side biased_side(const FeatureStore& store, long anchor);

// Side oracle for audio-free synthetic timelines: prefer the side whose
// probes share the anchor's segment instance; ties pick `after`.
Side biased_side_oracle(const SegmentTimeline& timeline, long anchor);

// Biased triplet for a given anchor and side: the positive is drawn from the
// chosen side's half of the positive window, the negative from the opposite
// side's region only.
TripletIndices sample_triplet_biased_given(long anchor, Side side, long total,
                                           const SamplingParams& p, Rng& rng);
TripletIndices sample_triplet_biased(const FeatureStore& store,
                                     const SamplingParams& p, Rng& rng);

// Closed-form probability that the positive example falls outside the
// anchor's segment, for a segment of length l (evaluated verbatim; the first
// branch exceeds 1 for very short segments unless clamped).
double fp_probability(long segment_len, int delta_p, bool clamp = false);

// Closed-form false-negative probability for an anchor inside the given
// segment instance (verbatim; may leave [0,1] unless clamped).
double fn_probability(const SegmentTimeline& timeline,
                      std::size_t segment_index, const SamplingParams& p,
                      bool clamp = false);

struct MonteCarloRates {
    double fp_rate = 0.0;
    double fn_rate = 0.0;
    long trials = 0;
};

// Empirical FP/FN rates on a synthetic timeline. FP: positive drawn from a
// different segment instance than the anchor. FN: negative sharing the
// anchor's label. anchor_margin restricts anchors to
// [margin, total-1-margin] (0 = whole track).
MonteCarloRates monte_carlo_rates(const SegmentTimeline& timeline,
                                  const SamplingParams& p, bool biased,
                                  long trials, Rng& rng,
                                  long anchor_margin = 0);

} // namespace segbed
