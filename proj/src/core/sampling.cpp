#include "sampling.hpp"

#include "errors.hpp"
#include "twodfft.hpp"

#include <algorithm>
#include <cmath>

namespace segbed {

namespace {

double euclidean(const std::vector<float>& a, const std::vector<float>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

long draw_from_range(const IndexRange& r, Rng& rng) {
    return r.lo + static_cast<long>(rng.next_below(
                      static_cast<std::uint64_t>(r.count())));
}

} // namespace

void SamplingParams::validate() const {
    if (delta_p < 1 || delta_n_min < 0 || delta_n_max <= delta_n_min) {
        raise(ErrorCode::invalid_argument, "bad sampling parameters");
    }
}

IndexRange positive_region(long anchor, long total, int delta_p) {
    return {std::max(anchor - delta_p, 0L),
            std::min(anchor + delta_p, total - 1)};
}

std::pair<IndexRange, IndexRange> negative_regions(long anchor, long total,
                                                   const SamplingParams& p) {
    const IndexRange before{std::max(anchor - p.delta_n_max, 0L),
                            std::max(anchor - p.delta_n_min, 0L)};
    const IndexRange after{std::min(anchor + p.delta_n_min, total - 1),
                           std::min(anchor + p.delta_n_max, total - 1)};
    return {before, after};
}

long sample_negative(long anchor, long total, const SamplingParams& p,
                     Rng& rng) {
    auto [r1, r2] = negative_regions(anchor, total, p);
    // Clipping can make the regions touch; deduplicate before the uniform
    // choice so every index is equally likely.
    if (r2.lo <= r1.hi) {
        const IndexRange merged{r1.lo, std::max(r1.hi, r2.hi)};
        return draw_from_range(merged, rng);
    }
    const long total_count = r1.count() + r2.count();
    if (total_count <= 0) {
        raise(ErrorCode::empty_negative_region, "no negative candidates");
    }
    const long pick = static_cast<long>(
        rng.next_below(static_cast<std::uint64_t>(total_count)));
    return pick < r1.count() ? r1.lo + pick : r2.lo + (pick - r1.count());
}

TripletIndices sample_triplet_given_anchor(long anchor, long total,
                                           const SamplingParams& p, Rng& rng) {
    TripletIndices t;
    t.anchor = anchor;
    t.positive = draw_from_range(positive_region(anchor, total, p.delta_p), rng);
    t.negative = sample_negative(anchor, total, p, rng);
    return t;
}

TripletIndices sample_triplet(long total, const SamplingParams& p, Rng& rng) {
    p.validate();
    if (total < 2L * p.delta_n_min + 1) {
        raise(ErrorCode::empty_negative_region,
              "track too short for the negative regions");
    }
    const long anchor =
        static_cast<long>(rng.next_below(static_cast<std::uint64_t>(total)));
    return sample_triplet_given_anchor(anchor, total, p, rng);
}

bool can_bias(long anchor, long total) {
    return anchor - 16 >= 0 && anchor + 16 <= total - 1;
}

Side biased_side(const FeatureStore& store, long anchor) {
    constexpr int kSegmentBeats = 8;
    const int R = store.config().subdivisions;
    const std::size_t rows = static_cast<std::size_t>(kSegmentBeats) * R;
    const std::size_t cols = static_cast<std::size_t>(store.config().bins);

    auto feature = [&](long beat) {
        return twodfft_feature(store.beat_segment(beat, kSegmentBeats), rows,
                               cols);
    };
    const std::vector<float> center = feature(anchor);
    const double before_score = euclidean(center, feature(anchor - 4)) +
                                euclidean(center, feature(anchor - 16));
    const double after_score = euclidean(center, feature(anchor + 4)) +
                               euclidean(center, feature(anchor + 16));
    return before_score < after_score ? Side::before : Side::after;
}

Side biased_side_oracle(const SegmentTimeline& timeline, long anchor) {
    const std::size_t home = timeline.segment_of(anchor);
    int before_hits = 0, after_hits = 0;
    for (long d : {4L, 16L}) {
        if (timeline.segment_of(anchor - d) == home) ++before_hits;
        if (timeline.segment_of(anchor + d) == home) ++after_hits;
    }
    return before_hits > after_hits ? Side::before : Side::after;
}

TripletIndices sample_triplet_biased_given(long anchor, Side side, long total,
                                           const SamplingParams& p, Rng& rng) {
    TripletIndices t;
    t.anchor = anchor;

    const IndexRange full = positive_region(anchor, total, p.delta_p);
    IndexRange pos = side == Side::before
                         ? IndexRange{full.lo, anchor}
                         : IndexRange{anchor, full.hi};
    if (pos.count() <= 0) pos = full;
    t.positive = draw_from_range(pos, rng);

    auto [before_neg, after_neg] = negative_regions(anchor, total, p);
    const IndexRange neg = side == Side::before ? after_neg : before_neg;
    t.negative = neg.count() > 0 ? draw_from_range(neg, rng)
                                 : sample_negative(anchor, total, p, rng);
    return t;
}

TripletIndices sample_triplet_biased(const FeatureStore& store,
                                     const SamplingParams& p, Rng& rng) {
    p.validate();
    const long total = static_cast<long>(store.beat_count());
    if (total < 2L * p.delta_n_min + 1) {
        raise(ErrorCode::empty_negative_region,
              "track too short for the negative regions");
    }
    const long anchor =
        static_cast<long>(rng.next_below(static_cast<std::uint64_t>(total)));
    if (!can_bias(anchor, total)) {
        return sample_triplet_given_anchor(anchor, total, p, rng);
    }
    return sample_triplet_biased_given(anchor, biased_side(store, anchor),
                                       total, p, rng);
}

double fp_probability(long segment_len, int delta_p, bool clamp) {
    if (segment_len < 1 || delta_p < 0) {
        raise(ErrorCode::invalid_argument, "bad fp_probability arguments");
    }
    const double l = static_cast<double>(segment_len);
    const double d = static_cast<double>(delta_p);
    double p;
    if (l <= d) {
        p = (2.0 * d - l) / l;
    } else if (l < 2.0 * d) {
        p = d * d / (2.0 * l * l) - 3.0 * d / (4.0 * l) + 0.5;
    } else {
        p = d / (4.0 * l);
    }
    if (clamp) p = std::clamp(p, 0.0, 1.0);
    return p;
}

double fn_probability(const SegmentTimeline& timeline,
                      std::size_t segment_index, const SamplingParams& p,
                      bool clamp) {
    if (segment_index >= timeline.segments.size()) {
        raise(ErrorCode::out_of_range, "segment index outside timeline");
    }
    const TimelineSegment& seg = timeline.segments[segment_index];
    const double label_share =
        static_cast<double>(timeline.label_total(seg.label)) /
        static_cast<double>(timeline.total_beats);
    const double fp_at_min =
        fp_probability(seg.length(), p.delta_n_min, false);
    double r = label_share - (1.0 - fp_at_min);
    if (clamp) r = std::clamp(r, 0.0, 1.0);
    return r;
}

MonteCarloRates monte_carlo_rates(const SegmentTimeline& timeline,
                                  const SamplingParams& p, bool biased,
                                  long trials, Rng& rng, long anchor_margin) {
    p.validate();
    timeline.validate();
    if (trials < 1) {
        raise(ErrorCode::invalid_argument, "trials must be >= 1");
    }
    const long total = timeline.total_beats;
    const long lo = std::clamp(anchor_margin, 0L, total - 1);
    const long hi = std::max(lo, total - 1 - anchor_margin);

    long fp = 0, fn = 0;
    for (long i = 0; i < trials; ++i) {
        const long anchor =
            lo + static_cast<long>(
                     rng.next_below(static_cast<std::uint64_t>(hi - lo + 1)));
        TripletIndices t;
        if (biased && can_bias(anchor, total)) {
            t = sample_triplet_biased_given(
                anchor, biased_side_oracle(timeline, anchor), total, p, rng);
        } else {
            t = sample_triplet_given_anchor(anchor, total, p, rng);
        }
        if (timeline.segment_of(t.positive) != timeline.segment_of(t.anchor)) {
            ++fp;
        }
        if (timeline.label_of(t.negative) == timeline.label_of(t.anchor)) {
            ++fn;
        }
    }
    MonteCarloRates rates;
    rates.trials = trials;
    rates.fp_rate = static_cast<double>(fp) / static_cast<double>(trials);
    rates.fn_rate = static_cast<double>(fn) / static_cast<double>(trials);
    return rates;
}

} // namespace segbed
