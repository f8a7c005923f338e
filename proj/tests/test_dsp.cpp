#include "core/beats.hpp"
#include "core/cqt.hpp"
#include "core/errors.hpp"
#include "core/fft.hpp"
#include "core/rng.hpp"
#include "core/twodfft.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <complex>
#include <fstream>

using namespace segbed;

namespace {

// Direct DFT oracle for the FFT.
std::vector<std::complex<double>> naive_dft(
    const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double a = -2.0 * M_PI * static_cast<double>(k * j) / n;
            acc += x[j] * std::complex<double>{std::cos(a), std::sin(a)};
        }
        out[k] = acc;
    }
    return out;
}

AudioBuffer tone(double freq, double seconds, double amp = 0.5) {
    return audio_from_samples(testutil::sine(freq, seconds, 22050, amp), 22050,
                              22050);
}

AudioBuffer click_track(double bpm, double seconds, double offset = 0.0) {
    const int rate = 22050;
    std::vector<float> x(static_cast<std::size_t>(seconds * rate), 0.0f);
    Rng rng(7);
    const double period = 60.0 / bpm;
    for (double t = offset; t < seconds; t += period) {
        const std::size_t start = static_cast<std::size_t>(t * rate);
        for (std::size_t i = 0; i < 256 && start + i < x.size(); ++i) {
            const float env = std::exp(-static_cast<float>(i) / 40.0f);
            x[start + i] += 0.8f * env *
                            static_cast<float>(rng.next_double(-1.0, 1.0));
        }
    }
    return audio_from_samples(std::move(x), rate, rate);
}

} // namespace

TEST_CASE("fft matches the direct DFT") {
    Rng rng(11);
    for (std::size_t n : {4u, 64u, 72u, 100u, 1u, 13u}) {
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {rng.next_double(-1, 1), rng.next_double(-1, 1)};
        const auto fast = fft::transform(x);
        const auto slow = naive_dft(x);
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(std::abs(fast[k] - slow[k]) < 1e-9);
        }
        // inverse round trip
        const auto back = fft::transform(fast, true);
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(std::abs(back[k] - x[k]) < 1e-9);
        }
    }
}

TEST_CASE("cqt of silence is zero") {
    AudioBuffer silence = audio_from_samples(std::vector<float>(22050, 0.0f),
                                             22050, 22050);
    // audio_from_samples rejects empty but keeps zeros
    CqtParams params;
    const auto m = cqt_at_times(silence, params, {0.2, 0.5, 0.8});
    REQUIRE(m.frames() == 3);
    REQUIRE(m.bins == 72);
    for (float v : m.magnitudes) CHECK(v == 0.0f);
}

TEST_CASE("440 Hz sine lands between bins 41 and 42") {
    const AudioBuffer a = tone(440.0, 2.0);
    CqtParams params;
    const auto m = cqt_at_times(a, params, {1.0});
    const float* row = m.row(0);
    const int argmax = static_cast<int>(
        std::max_element(row, row + m.bins) - row);
    CHECK((argmax == 41 || argmax == 42));
}

TEST_CASE("identical centers give identical frames") {
    const AudioBuffer a = tone(220.0, 1.0);
    CqtParams params;
    const auto m = cqt_at_times(a, params, {0.5, 0.5});
    REQUIRE(m.frames() == 2);
    for (int k = 0; k < m.bins; ++k) CHECK(m.row(0)[k] == m.row(1)[k]);
}

TEST_CASE("cqt magnitude is amplitude-linear") {
    const AudioBuffer a = tone(330.0, 1.0, 0.3);
    const AudioBuffer b = tone(330.0, 1.0, 0.6);
    CqtParams params;
    const auto ma = cqt_at_times(a, params, {0.5});
    const auto mb = cqt_at_times(b, params, {0.5});
    for (int k = 0; k < ma.bins; ++k) {
        if (ma.row(0)[k] < 1e-5) continue;
        CHECK(mb.row(0)[k] / ma.row(0)[k] == doctest::Approx(2.0).epsilon(1e-6));
    }
}

TEST_CASE("cqt center out of range is rejected") {
    const AudioBuffer a = tone(220.0, 1.0);
    CqtParams params;
    CHECK_THROWS_AS(cqt_at_times(a, params, {1.5}), Error);
    CHECK_THROWS_AS(cqt_at_times(a, params, {-0.1}), Error);
}

TEST_CASE("fixed-hop frame counts") {
    const AudioBuffer a = tone(220.0, 1.0);
    CqtParams params;
    CHECK(cqt_fixed_hop(a, params, 0.1).frames() == 11);
    CHECK(cqt_fixed_hop(a, params, 0.0036).frames() == 278);
}

TEST_CASE("fixed hop equals cqt_at_times on the same centers") {
    const AudioBuffer a = tone(440.0, 0.5);
    CqtParams params;
    const auto hop = cqt_fixed_hop(a, params, 0.05);
    const auto direct = cqt_at_times(a, params, hop.frame_centers);
    REQUIRE(hop.frames() == direct.frames());
    CHECK(hop.magnitudes == direct.magnitudes);
}

TEST_CASE("2D-FFT feature basics") {
    const std::size_t T = 64, K = 72;

    SUBCASE("all zeros give a constant log(eps) vector") {
        std::vector<float> zeros(T * K, 0.0f);
        const auto f = twodfft_feature(zeros, T, K);
        REQUIRE(f.size() == T * K);
        for (float v : f) CHECK(v == doctest::Approx(std::log(1e-6)));
    }

    SUBCASE("circular shifts leave the feature unchanged") {
        Rng rng(3);
        std::vector<float> x(T * K);
        for (auto& v : x) v = static_cast<float>(rng.next_double(-2, 2));
        const auto base = twodfft_feature(x, T, K);

        for (std::size_t shift : {1u, 7u, 31u}) {
            std::vector<float> rolled(T * K);
            for (std::size_t t = 0; t < T; ++t) {
                for (std::size_t k = 0; k < K; ++k) {
                    rolled[((t + shift) % T) * K + k] = x[t * K + k];
                }
            }
            const auto f = twodfft_feature(rolled, T, K);
            double max_err = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) {
                max_err = std::max(max_err,
                                   std::abs(static_cast<double>(f[i]) - base[i]));
            }
            CHECK(max_err < 1e-6);
        }
        // and along the frequency axis
        std::vector<float> rolled(T * K);
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t k = 0; k < K; ++k) {
                rolled[t * K + (k + 5) % K] = x[t * K + k];
            }
        }
        const auto f = twodfft_feature(rolled, T, K);
        double max_err = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            max_err = std::max(max_err,
                               std::abs(static_cast<double>(f[i]) - base[i]));
        }
        CHECK(max_err < 1e-6);
    }

    SUBCASE("shape mismatch is rejected") {
        std::vector<float> wrong(T * K - 1, 0.0f);
        CHECK_THROWS_AS(twodfft_feature(wrong, T, K), Error);
    }
}

TEST_CASE("beat tracking finds a 120 BPM click track") {
    const AudioBuffer clicks = click_track(120.0, 10.0);
    const BeatGrid grid = track_beats(clicks);
    CHECK(grid.count() >= 17);
    CHECK(grid.count() <= 23);

    std::vector<double> intervals;
    for (std::size_t i = 1; i < grid.count(); ++i) {
        intervals.push_back(grid.beat_times[i] - grid.beat_times[i - 1]);
    }
    std::sort(intervals.begin(), intervals.end());
    const double median = intervals[intervals.size() / 2];
    CHECK(std::abs(median - 0.5) < 0.02);

    // strictly increasing, bounded by duration
    for (std::size_t i = 1; i < grid.count(); ++i) {
        CHECK(grid.beat_times[i] > grid.beat_times[i - 1]);
    }
    CHECK(grid.beat_times.back() <= clicks.duration_sec());
    CHECK(grid.beat_times.front() >= 0.0);
}

TEST_CASE("silence falls back to a uniform 120 BPM grid") {
    AudioBuffer silence = audio_from_samples(
        std::vector<float>(10 * 22050, 0.0f), 22050, 22050);
    const BeatGrid grid = track_beats(silence);
    REQUIRE(grid.count() == 20);
    for (std::size_t i = 0; i < grid.count(); ++i) {
        CHECK(grid.beat_times[i] == doctest::Approx(0.5 * i));
    }
}

TEST_CASE("shifted clicks shift the beats") {
    const BeatGrid base = track_beats(click_track(120.0, 10.0));
    const BeatGrid shifted = track_beats(click_track(120.0, 10.0, 0.1));
    // Compare interior beats: each shifted beat should be ~0.1 s after some
    // base beat.
    std::size_t matched = 0;
    for (double t : shifted.beat_times) {
        if (t < 1.0 || t > 9.0) continue;
        double best = 1e9;
        for (double b : base.beat_times) best = std::min(best, std::abs(t - (b + 0.1)));
        if (best < 0.03) ++matched;
        CHECK(best < 0.03);
    }
    CHECK(matched >= 10);
}

TEST_CASE("beats file round trip and validation") {
    const auto dir = testutil::scratch_dir("beats_io");
    BeatGrid grid;
    grid.beat_times = {0.0, 0.5, 1.0, 1.75};
    write_beats_file(grid, dir + "/beats.txt");
    const BeatGrid back = read_beats_file(dir + "/beats.txt");
    REQUIRE(back.count() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(back.beat_times[i] == doctest::Approx(grid.beat_times[i]));
    }

    std::ofstream bad(dir + "/bad.txt");
    bad << "0.5\n0.25\n";
    bad.close();
    CHECK_THROWS_AS(read_beats_file(dir + "/bad.txt"), Error);
}
