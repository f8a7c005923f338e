#include "timeline.hpp"

#include "errors.hpp"

#include <algorithm>

namespace segbed {

void SegmentTimeline::validate() const {
    if (segments.empty()) {
        raise(ErrorCode::invalid_argument, "timeline has no segments");
    }
    long cursor = 0;
    for (const auto& s : segments) {
        if (s.start != cursor || s.length() < 1) {
            raise(ErrorCode::invalid_argument,
                  "timeline segments must be contiguous with length >= 1");
        }
        cursor = s.end;
    }
    if (cursor != total_beats) {
        raise(ErrorCode::invalid_argument,
              "timeline segments must cover [0, total_beats)");
    }
}

std::size_t SegmentTimeline::segment_of(long beat) const {
    if (beat < 0 || beat >= total_beats) {
        raise(ErrorCode::out_of_range, "beat outside timeline");
    }
    auto it = std::upper_bound(
        segments.begin(), segments.end(), beat,
        [](long b, const TimelineSegment& s) { return b < s.end; });
    return static_cast<std::size_t>(it - segments.begin());
}

int SegmentTimeline::label_of(long beat) const {
    return segments[segment_of(beat)].label;
}

long SegmentTimeline::label_total(int label) const {
    long total = 0;
    for (const auto& s : segments) {
        if (s.label == label) total += s.length();
    }
    return total;
}

SegmentTimeline synth_timeline(int n_segments, long min_len, long max_len,
                               int n_labels, Rng& rng) {
    if (n_segments < 1 || n_labels < 1 || min_len < 1 || max_len < min_len) {
        raise(ErrorCode::invalid_argument, "bad synthetic timeline parameters");
    }
    SegmentTimeline tl;
    long cursor = 0;
    for (int i = 0; i < n_segments; ++i) {
        const long len = rng.next_int(min_len, max_len);
        tl.segments.push_back({cursor, cursor + len, i % n_labels});
        cursor += len;
    }
    tl.total_beats = cursor;
    return tl;
}

} // namespace segbed
