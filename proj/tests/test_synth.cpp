#include "core/audio.hpp"
#include "core/beats.hpp"
#include "core/evaluation.hpp"
#include "core/synth.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace segbed;

namespace {

SynthParams quick_params() {
    SynthParams p;
    p.seg_len_min_beats = 16; // short tracks keep the test fast
    p.seg_len_max_beats = 24;
    p.n_segments_min = 3;
    p.n_segments_max = 5;
    return p;
}

} // namespace

TEST_CASE("synth tracks have consistent annotations and audio") {
    const SynthTrack track = synth_track(7, quick_params());
    CHECK(track.sample_rate == 22050);
    CHECK(track.total_beats >= 3 * 16);
    CHECK(track.samples.size() ==
          static_cast<std::size_t>(track.total_beats * 0.5 * 22050));

    const auto& ann = track.annotations;
    REQUIRE(!ann.intervals.empty());
    CHECK(ann.intervals.front().start == doctest::Approx(0.0));
    CHECK(ann.intervals.back().end == doctest::Approx(ann.duration_sec));
    for (std::size_t i = 1; i < ann.intervals.size(); ++i) {
        CHECK(ann.intervals[i].start ==
              doctest::Approx(ann.intervals[i - 1].end));
        // adjacent segments change texture
        CHECK(ann.intervals[i].label != ann.intervals[i - 1].label);
    }

    float peak = 0.0f;
    for (float v : track.samples) peak = std::max(peak, std::abs(v));
    CHECK(peak > 0.05f);
    CHECK(peak <= 0.96f);
}

TEST_CASE("same seed gives identical tracks, different seeds differ") {
    const SynthTrack a = synth_track(123, quick_params());
    const SynthTrack b = synth_track(123, quick_params());
    CHECK(a.samples == b.samples);
    CHECK(a.total_beats == b.total_beats);

    const SynthTrack c = synth_track(124, quick_params());
    CHECK(a.samples != c.samples);
}

TEST_CASE("synth corpus writes parseable files, reproducibly") {
    const auto dir = testutil::scratch_dir("synth_corpus");
    const auto stems = synth_corpus(dir, 3, 50, quick_params());
    REQUIRE(stems.size() == 3);
    for (const auto& stem : stems) {
        CHECK(std::filesystem::exists(dir + "/" + stem + ".wav"));
        const auto ann = parse_annotations(dir + "/" + stem + ".tsv");
        CHECK(ann.duration_sec > 0.0);
        const AudioBuffer audio = load_audio(dir + "/" + stem + ".wav", 22050);
        CHECK(audio.duration_sec() == doctest::Approx(ann.duration_sec));
    }

    // byte-identical on regeneration with the same seed
    const auto dir2 = testutil::scratch_dir("synth_corpus_2");
    synth_corpus(dir2, 3, 50, quick_params());
    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
    };
    for (const auto& stem : stems) {
        CHECK(slurp(dir + "/" + stem + ".wav") ==
              slurp(dir2 + "/" + stem + ".wav"));
    }
}

TEST_CASE("beat tracking locks onto a synth track's tempo") {
    SynthParams p = quick_params();
    p.n_segments_min = 4;
    p.n_segments_max = 4;
    const SynthTrack track = synth_track(99, p);
    AudioBuffer audio;
    audio.samples = track.samples;
    audio.sample_rate = track.sample_rate;

    const BeatGrid grid = track_beats(audio);
    REQUIRE(grid.count() >= 10);
    std::vector<double> intervals;
    for (std::size_t i = 1; i < grid.count(); ++i) {
        intervals.push_back(grid.beat_times[i] - grid.beat_times[i - 1]);
    }
    std::sort(intervals.begin(), intervals.end());
    const double median = intervals[intervals.size() / 2];
    CHECK(median == doctest::Approx(0.5).epsilon(0.05));
}
