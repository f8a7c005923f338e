#pragma once

#include "rng.hpp"

#include <vector>

namespace segbed {

// Labeled segment timeline in beat indices. Segments are contiguous,
// non-overlapping, and cover [0, total_beats).
struct TimelineSegment {
    long start = 0; // inclusive
    long end = 0;   // exclusive
    int label = 0;

    long length() const { return end - start; }
};

struct SegmentTimeline {
    std::vector<TimelineSegment> segments;
    long total_beats = 0;

    void validate() const;
    // Index of the segment instance containing the beat.
    std::size_t segment_of(long beat) const;
    int label_of(long beat) const;
    // Total beats carrying the given label.
    long label_total(int label) const;
};

// Contiguous random timeline: n_segments with lengths uniform in
// [min_len, max_len] and labels cycling over n_labels.
SegmentTimeline synth_timeline(int n_segments, long min_len, long max_len,
                               int n_labels, Rng& rng);

} // namespace segbed
