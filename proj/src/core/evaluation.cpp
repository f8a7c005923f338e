#include "evaluation.hpp"

#include "errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace segbed {

using nlohmann::json;

std::vector<double> AnnotationSet::boundaries_sec() const {
    std::vector<double> b;
    b.push_back(0.0);
    for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
        b.push_back(intervals[i].end);
    }
    b.push_back(duration_sec);
    return b;
}

AnnotationSet parse_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io_failure, "cannot open " + path);

    AnnotationSet ann;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        AnnotatedInterval iv;
        std::string start_s, end_s;
        if (!std::getline(ss, start_s, '\t') ||
            !std::getline(ss, end_s, '\t') || !std::getline(ss, iv.label)) {
            raise(ErrorCode::parse_error,
                  path + ":" + std::to_string(line_no) +
                      ": expected start<TAB>end<TAB>label");
        }
        try {
            iv.start = std::stod(start_s);
            iv.end = std::stod(end_s);
        } catch (const std::exception&) {
            raise(ErrorCode::parse_error,
                  path + ":" + std::to_string(line_no) + ": bad number");
        }
        if (iv.end <= iv.start) {
            raise(ErrorCode::parse_error,
                  path + ":" + std::to_string(line_no) +
                      ": interval end must exceed start");
        }
        ann.intervals.push_back(std::move(iv));
    }
    if (ann.intervals.empty()) {
        raise(ErrorCode::parse_error, path + ": no intervals");
    }

    constexpr double kJoinTolerance = 1e-6;
    double cursor = ann.intervals.front().start;
    if (std::abs(cursor) > kJoinTolerance) {
        raise(ErrorCode::parse_error, path + ": first interval must start at 0");
    }
    for (std::size_t i = 0; i < ann.intervals.size(); ++i) {
        const double gap = ann.intervals[i].start - cursor;
        if (gap > kJoinTolerance) {
            raise(ErrorCode::gap_between_segments,
                  path + ": gap before interval " + std::to_string(i));
        }
        if (gap < -kJoinTolerance) {
            raise(ErrorCode::overlapping_segments,
                  path + ": interval " + std::to_string(i) +
                      " overlaps its predecessor");
        }
        cursor = ann.intervals[i].end;
    }
    ann.duration_sec = cursor;
    return ann;
}

void write_annotations(const AnnotationSet& ann, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path);
    out.precision(9);
    for (const auto& iv : ann.intervals) {
        out << iv.start << '\t' << iv.end << '\t' << iv.label << '\n';
    }
}

std::vector<double> trim_boundaries(const std::vector<double>& boundaries,
                                    double duration_sec) {
    constexpr double kTrimRadius = 0.5;
    std::vector<double> out;
    for (double t : boundaries) {
        if (t > kTrimRadius && t < duration_sec - kTrimRadius) {
            out.push_back(t);
        }
    }
    return out;
}

BoundaryMetrics hit_rate(const std::vector<double>& est,
                         const std::vector<double>& ref, double window_sec) {
    BoundaryMetrics m;
    m.window_sec = window_sec;
    m.n_est = est.size();
    m.n_ref = ref.size();

    // Two-pointer sweep over the sorted lists: with a uniform window the
    // greedy in-order matching is a maximum matching (verified against brute
    // force in the tests).
    std::size_t i = 0, j = 0, hits = 0;
    while (i < est.size() && j < ref.size()) {
        if (std::abs(est[i] - ref[j]) <= window_sec) {
            ++hits;
            ++i;
            ++j;
        } else if (ref[j] < est[i] - window_sec) {
            ++j;
        } else {
            ++i;
        }
    }
    m.n_hits = hits;
    m.precision = m.n_est > 0 ? static_cast<double>(hits) / m.n_est : 0.0;
    m.recall = m.n_ref > 0 ? static_cast<double>(hits) / m.n_ref : 0.0;
    m.f_measure = m.precision + m.recall > 0.0
                      ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                      : 0.0;
    return m;
}

CorpusReport evaluate_corpus(const std::vector<TrackEvaluation>& tracks,
                             double window_sec) {
    if (tracks.empty()) {
        raise(ErrorCode::empty_dataset, "no tracks to evaluate");
    }
    CorpusReport report;
    report.window_sec = window_sec;
    report.tracks = tracks;

    std::vector<double> f, p, r;
    for (const auto& t : tracks) {
        if (!t.ok) continue;
        f.push_back(t.metrics.f_measure);
        p.push_back(t.metrics.precision);
        r.push_back(t.metrics.recall);
    }
    report.evaluated = f.size();
    auto mean_of = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
    };
    auto std_of = [&](const std::vector<double>& v, double mean) {
        double acc = 0.0;
        for (double x : v) acc += (x - mean) * (x - mean);
        return v.empty() ? 0.0
                         : std::sqrt(acc / static_cast<double>(v.size()));
    };
    report.mean_f = mean_of(f);
    report.std_f = std_of(f, report.mean_f);
    report.mean_p = mean_of(p);
    report.std_p = std_of(p, report.mean_p);
    report.mean_r = mean_of(r);
    report.std_r = std_of(r, report.mean_r);
    return report;
}

void write_report_json(const CorpusReport& report, const std::string& path) {
    json j;
    j["window_sec"] = report.window_sec;
    j["mean_f"] = report.mean_f;
    j["std_f"] = report.std_f;
    j["mean_p"] = report.mean_p;
    j["std_p"] = report.std_p;
    j["mean_r"] = report.mean_r;
    j["std_r"] = report.std_r;
    j["evaluated"] = report.evaluated;
    json per_track = json::array();
    for (const auto& t : report.tracks) {
        json row;
        row["id"] = t.track_id;
        if (t.ok) {
            row["f"] = t.metrics.f_measure;
            row["p"] = t.metrics.precision;
            row["r"] = t.metrics.recall;
            row["hits"] = t.metrics.n_hits;
            row["n_est"] = t.metrics.n_est;
            row["n_ref"] = t.metrics.n_ref;
        } else {
            row["error"] = t.error;
        }
        per_track.push_back(row);
    }
    j["per_track"] = per_track;

    std::ofstream out(path, std::ios::trunc);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path);
    out << j.dump(2) << "\n";
}

CorpusReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io_failure, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        raise(ErrorCode::parse_error, path + ": " + e.what());
    }
    CorpusReport report;
    try {
        report.window_sec = j.at("window_sec").get<double>();
        report.mean_f = j.at("mean_f").get<double>();
        report.std_f = j.at("std_f").get<double>();
        report.mean_p = j.at("mean_p").get<double>();
        report.std_p = j.at("std_p").get<double>();
        report.mean_r = j.at("mean_r").get<double>();
        report.std_r = j.at("std_r").get<double>();
        report.evaluated = j.at("evaluated").get<std::size_t>();
        for (const auto& row : j.at("per_track")) {
            TrackEvaluation t;
            t.track_id = row.at("id").get<std::string>();
            if (row.contains("error")) {
                t.ok = false;
                t.error = row.at("error").get<std::string>();
            } else {
                t.metrics.f_measure = row.at("f").get<double>();
                t.metrics.precision = row.at("p").get<double>();
                t.metrics.recall = row.at("r").get<double>();
                t.metrics.n_hits = row.at("hits").get<std::size_t>();
                t.metrics.n_est = row.at("n_est").get<std::size_t>();
                t.metrics.n_ref = row.at("n_ref").get<std::size_t>();
                t.metrics.window_sec = report.window_sec;
            }
            report.tracks.push_back(std::move(t));
        }
    } catch (const json::exception& e) {
        raise(ErrorCode::parse_error, path + ": " + e.what());
    }
    return report;
}

} // namespace segbed
