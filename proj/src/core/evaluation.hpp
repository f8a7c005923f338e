#pragma once

#include <string>
#include <vector>

namespace segbed {

struct AnnotatedInterval {
    double start = 0.0;
    double end = 0.0;
    std::string label;
};

// Contiguous labeled intervals covering [0, duration].
struct AnnotationSet {
    std::vector<AnnotatedInterval> intervals;
    double duration_sec = 0.0;

    // Interior interval edges plus 0 and duration, strictly increasing.
    std::vector<double> boundaries_sec() const;
};

// TSV lines `start<TAB>end<TAB>label` in seconds. Raises parse_error on
// malformed rows, overlapping_segments / gap_between_segments on
// non-contiguous timelines.
AnnotationSet parse_annotations(const std::string& path);
void write_annotations(const AnnotationSet& ann, const std::string& path);

// Drop boundaries within 0.5 s of the track start or end (those are never
// credited by the trimmed hit rate).
std::vector<double> trim_boundaries(const std::vector<double>& boundaries,
                                    double duration_sec);

struct BoundaryMetrics {
    double f_measure = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double window_sec = 3.0;
    std::size_t n_hits = 0;
    std::size_t n_est = 0;
    std::size_t n_ref = 0;
};

// Maximum one-to-one matching between estimated and reference boundaries
// where a pair matches iff |t_e - t_r| <= window. Both lists must be sorted;
// empty lists zero the corresponding metric.
BoundaryMetrics hit_rate(const std::vector<double>& est,
                         const std::vector<double>& ref,
                         double window_sec = 3.0);

struct TrackEvaluation {
    std::string track_id;
    bool ok = true;
    std::string error;
    BoundaryMetrics metrics;
};

struct CorpusReport {
    double window_sec = 3.0;
    std::vector<TrackEvaluation> tracks;
    double mean_f = 0.0, std_f = 0.0;
    double mean_p = 0.0, std_p = 0.0;
    double mean_r = 0.0, std_r = 0.0;
    std::size_t evaluated = 0;
};

// Mean and population standard deviation over the successfully evaluated
// tracks.
CorpusReport evaluate_corpus(const std::vector<TrackEvaluation>& tracks,
                             double window_sec);

void write_report_json(const CorpusReport& report, const std::string& path);
CorpusReport read_report_json(const std::string& path);

} // namespace segbed
