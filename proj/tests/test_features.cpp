#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/store.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

using namespace segbed;

namespace {

BeatGrid make_beats(std::size_t count, double spacing = 0.5) {
    BeatGrid g;
    for (std::size_t i = 0; i < count; ++i) g.beat_times.push_back(i * spacing);
    return g;
}

// A store whose row r has constant value base + r across all bins; patch
// content is then fully predictable.
FeatureStore ramp_store(std::size_t beats, PatchConfig cfg, float base = 0.0f) {
    const std::size_t rows = beats * cfg.subdivisions;
    std::vector<float> data(rows * cfg.bins);
    for (std::size_t r = 0; r < rows; ++r) {
        for (int k = 0; k < cfg.bins; ++k) {
            data[r * cfg.bins + k] = base + static_cast<float>(r);
        }
    }
    return FeatureStore("ramp", cfg, make_beats(beats).beat_times,
                        std::move(data));
}

} // namespace

TEST_CASE("subdivision centers: formula plus extrapolation") {
    BeatGrid g;
    g.beat_times = {0.0, 1.0};
    const auto c4 = subdivision_centers(g, 4);
    REQUIRE(c4.size() == 8);
    const double expected4[] = {0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75};
    for (int i = 0; i < 8; ++i) CHECK(c4[i] == doctest::Approx(expected4[i]));

    const auto c1 = subdivision_centers(g, 1);
    REQUIRE(c1.size() == 2);
    CHECK(c1[0] == doctest::Approx(0.0));
    CHECK(c1[1] == doctest::Approx(1.0));

    BeatGrid g3;
    g3.beat_times = {0.0, 0.5, 1.5};
    const auto c2 = subdivision_centers(g3, 2);
    REQUIRE(c2.size() == 6);
    const double expected2[] = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0};
    for (int i = 0; i < 6; ++i) CHECK(c2[i] == doctest::Approx(expected2[i]));
}

TEST_CASE("subdivision centers require two beats") {
    BeatGrid g;
    g.beat_times = {0.0};
    CHECK_THROWS_AS(subdivision_centers(g, 4), Error);
}

TEST_CASE("subdivision centers stay strictly increasing") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        BeatGrid g;
        double t = rng.next_double(0.0, 0.2);
        const int n = static_cast<int>(rng.next_int(2, 40));
        for (int i = 0; i < n; ++i) {
            g.beat_times.push_back(t);
            t += rng.next_double(0.2, 1.2);
        }
        const auto centers = subdivision_centers(g, 8);
        REQUIRE(centers.size() == g.beat_times.size() * 8);
        for (std::size_t i = 1; i < centers.size(); ++i) {
            CHECK(centers[i] > centers[i - 1]);
        }
    }
}

TEST_CASE("patch extraction") {
    PatchConfig cfg;
    cfg.beats = 4;
    cfg.subdivisions = 2;
    cfg.bins = 3;
    const FeatureStore store = ramp_store(12, cfg);
    const int Q = cfg.rows(); // 8

    SUBCASE("interior patches copy the store rows exactly") {
        const Patch p = store.patch(6);
        REQUIRE(p.rows == Q);
        REQUIRE(p.cols == 3);
        // rows [6*2 - 4, 6*2 + 4) = [8, 16)
        for (int q = 0; q < Q; ++q) {
            for (int k = 0; k < 3; ++k) {
                CHECK(p.values[q * 3 + k] == doctest::Approx(8.0f + q));
            }
        }
    }

    SUBCASE("left edge replicates row zero") {
        const Patch p = store.patch(0);
        // rows [-4, 4): first 4 rows replicate row 0
        for (int q = 0; q < Q / 2; ++q) {
            for (int k = 0; k < 3; ++k) {
                CHECK(p.values[q * 3 + k] == doctest::Approx(0.0f));
            }
        }
        for (int q = Q / 2; q < Q; ++q) {
            CHECK(p.values[q * 3] == doctest::Approx(q - Q / 2));
        }
    }

    SUBCASE("constant store gives constant patches") {
        std::vector<float> data(12 * 2 * 3, 2.5f);
        const FeatureStore flat("flat", cfg, make_beats(12).beat_times,
                                std::move(data));
        const Patch p = flat.patch(11);
        for (float v : p.values) CHECK(v == 2.5f);
    }

    SUBCASE("adjacent patches overlap in (B-1)*R rows") {
        const Patch a = store.patch(5);
        const Patch b = store.patch(6);
        const int overlap = (cfg.beats - 1) * cfg.subdivisions;
        // tail of a equals head of b
        for (int q = 0; q < overlap; ++q) {
            for (int k = 0; k < 3; ++k) {
                CHECK(a.values[(q + cfg.subdivisions) * 3 + k] ==
                      b.values[q * 3 + k]);
            }
        }
    }

    SUBCASE("out-of-range beat index is rejected") {
        CHECK_THROWS_AS(store.patch(12), Error);
    }
}

TEST_CASE("store round trip is bit-exact") {
    const auto dir = testutil::scratch_dir("store_rt");
    PatchConfig cfg;
    cfg.beats = 4;
    cfg.subdivisions = 2;
    cfg.bins = 5;
    Rng rng(17);
    std::vector<float> data(10 * 2 * 5);
    for (auto& v : data) v = static_cast<float>(rng.next_double(-10, 2));
    BeatGrid beats = make_beats(10, 0.4837291);
    const FeatureStore store("track_a", cfg, beats.beat_times, data);

    save_store(store, dir);
    const FeatureStore back = open_store(dir, "track_a");
    CHECK(back.track_id() == "track_a");
    CHECK(back.config().beats == cfg.beats);
    CHECK(back.config().subdivisions == cfg.subdivisions);
    CHECK(back.config().bins == cfg.bins);
    CHECK(back.raw_rows() == data);               // bit-exact values
    CHECK(back.beat_times() == beats.beat_times); // bit-exact times
}

TEST_CASE("two tracks coexist in one dataset dir") {
    const auto dir = testutil::scratch_dir("store_two");
    PatchConfig cfg;
    cfg.beats = 2;
    cfg.subdivisions = 1;
    cfg.bins = 2;
    const FeatureStore a("alpha", cfg, {0.0, 0.5, 1.0},
                         std::vector<float>(6, 1.0f));
    const FeatureStore b("beta", cfg, {0.0, 0.5, 1.0},
                         std::vector<float>(6, 2.0f));
    save_store(a, dir);
    save_store(b, dir);
    CHECK(open_store(dir, "alpha").raw_rows()[0] == 1.0f);
    CHECK(open_store(dir, "beta").raw_rows()[0] == 2.0f);
    CHECK(list_store_dirs(dir).size() == 2);
}

TEST_CASE("manifest/tensor mismatch raises shape_mismatch") {
    const auto dir = testutil::scratch_dir("store_bad");
    PatchConfig cfg;
    cfg.beats = 2;
    cfg.subdivisions = 1;
    cfg.bins = 2;
    const FeatureStore a("broken", cfg, {0.0, 0.5, 1.0},
                         std::vector<float>(6, 1.0f));
    save_store(a, dir);
    // truncate the tensor: 5 floats instead of 6
    {
        std::ofstream tf(dir + "/broken/cqt.f32",
                         std::ios::binary | std::ios::trunc);
        std::vector<float> five(5, 0.0f);
        tf.write(reinterpret_cast<const char*>(five.data()),
                 5 * sizeof(float));
    }
    try {
        open_store(dir, "broken");
        FAIL("expected shape_mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::shape_mismatch);
    }
}

TEST_CASE("corrupt manifest raises corrupt_manifest") {
    const auto dir = testutil::scratch_dir("store_corrupt");
    std::filesystem::create_directories(dir + "/t");
    {
        std::ofstream mf(dir + "/t/manifest.json");
        mf << "{ not json";
    }
    try {
        load_store(dir + "/t");
        FAIL("expected corrupt_manifest");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::corrupt_manifest);
    }
}

TEST_CASE("build_store wires beats, cqt and log compression together") {
    const auto sig = testutil::sine(220.0, 4.0, 22050, 0.5);
    const AudioBuffer audio = audio_from_samples(sig, 22050, 22050);
    BeatGrid beats = make_beats(8, 0.5);
    CqtParams cqt;
    PatchConfig cfg; // defaults: 16 beats won't fit 8, but patches replicate
    const FeatureStore store = build_store(audio, beats, cqt, cfg, "tone");
    CHECK(store.beat_count() == 8);
    CHECK(store.row_count() == 8 * 8);
    CHECK(store.config().bins == 72);
    // log compression: silence rows would be log(1e-6); a steady tone keeps
    // every value above that floor
    for (float v : store.raw_rows()) CHECK(v >= std::log(1e-6f) - 1e-3f);

    const Patch p = store.patch(4);
    CHECK(p.rows == 128);
    CHECK(p.cols == 72);
    for (float v : p.values) CHECK(std::isfinite(v));
}
