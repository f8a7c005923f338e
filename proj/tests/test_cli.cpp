// Behavior of the installed command line tool, run as a subprocess.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef SEGBED_CLI_PATH
#define SEGBED_CLI_PATH "segbed"
#endif

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args, const std::string& capture = "") {
    std::string cmd = std::string("'") + SEGBED_CLI_PATH + "' " + args;
    if (!capture.empty()) cmd += " > " + capture + " 2> " + capture + ".err";
    return std::system(cmd.c_str());
}

std::string scratch(const std::string& name) {
    const auto dir = fs::path("scratch_cli") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("dump-config output reloads to the same configuration") {
    const auto dir = scratch("dump");
    REQUIRE(cli("dump-config --set train.epochs=5", dir + "/a.cfg") == 0);
    REQUIRE(cli("dump-config --config " + dir + "/a.cfg", dir + "/b.cfg") == 0);
    CHECK(slurp(dir + "/a.cfg") == slurp(dir + "/b.cfg"));
    CHECK(slurp(dir + "/a.cfg").find("train.epochs = 5") != std::string::npos);
}

TEST_CASE("unknown config keys make commands fail fast") {
    CHECK(cli("dump-config --set not.a.key=1", "/dev/null") != 0);
}

TEST_CASE("features skips corrupt files but keeps going") {
    const auto dir = scratch("features");
    REQUIRE(cli("synth " + dir + "/audio 2 --seed 3 --segments-min 3"
                " --segments-max 3 --seg-len-min 16 --seg-len-max 20") == 0);
    {
        std::ofstream bad(dir + "/audio/broken.wav");
        bad << "this is not audio";
    }
    const int rc = cli("features " + dir + "/audio " + dir + "/stores"
                       " --jobs 2", dir + "/out.txt");
    CHECK(rc == 0); // per-track fault isolation
    CHECK(fs::exists(dir + "/stores/track_000/manifest.json"));
    CHECK(fs::exists(dir + "/stores/track_001/manifest.json"));
    CHECK(!fs::exists(dir + "/stores/broken"));
    CHECK(slurp(dir + "/out.txt.err").find("broken") != std::string::npos);
}

TEST_CASE("a beats directory bypasses the tracker") {
    const auto dir = scratch("beats_override");
    REQUIRE(cli("synth " + dir + "/audio 1 --seed 5 --segments-min 3"
                " --segments-max 3 --seg-len-min 16 --seg-len-max 16") == 0);
    // hand-written grid: 1 Hz beats, far from the true 2 Hz
    fs::create_directories(dir + "/beats");
    {
        std::ofstream f(dir + "/beats/track_000.txt");
        for (int i = 0; i < 24; ++i) f << i * 1.0 << "\n";
    }
    REQUIRE(cli("features " + dir + "/audio " + dir + "/stores --beats-dir " +
                dir + "/beats") == 0);
    const std::string manifest = slurp(dir + "/stores/track_000/manifest.json");
    CHECK(manifest.find("\"L\": 24") != std::string::npos);
}

TEST_CASE("empty store directory is a fatal error") {
    const auto dir = scratch("empty");
    fs::create_directories(dir + "/nothing");
    CHECK(cli("segment " + dir + "/nothing x " + dir + "/out --raw",
              dir + "/log.txt") != 0);
    CHECK(cli("train " + dir + "/nothing " + dir + "/m.segbed",
              dir + "/log2.txt") != 0);
}

TEST_CASE("eval window override tightens the metrics") {
    const auto dir = scratch("eval_window");
    fs::create_directories(dir + "/est");
    fs::create_directories(dir + "/ref");
    {
        std::ofstream est(dir + "/est/a.csv");
        est << "beat_index,time_sec\n20,10.0\n60,30.0\n";
        std::ofstream ref(dir + "/ref/a.tsv");
        ref << "0\t11.5\tA\n11.5\t31.0\tB\n31.0\t60\tC\n";
    }
    REQUIRE(cli("eval " + dir + "/est " + dir + "/ref " + dir + "/w3.json") ==
            0);
    REQUIRE(cli("eval " + dir + "/est " + dir + "/ref " + dir +
                "/w05.json --window 0.5") == 0);
    const std::string loose = slurp(dir + "/w3.json");
    const std::string strict = slurp(dir + "/w05.json");
    // 3 s window matches both boundaries; 0.5 s matches neither (1.5 and 1.0
    // seconds off)
    CHECK(loose.find("\"mean_f\": 1.0") != std::string::npos);
    CHECK(strict.find("\"mean_f\": 0.0") != std::string::npos);
}

TEST_CASE("missing counterpart files are reported per track") {
    const auto dir = scratch("eval_missing");
    fs::create_directories(dir + "/est");
    fs::create_directories(dir + "/ref");
    {
        std::ofstream ref(dir + "/ref/only_ref.tsv");
        ref << "0\t10\tA\n10\t20\tB\n";
        std::ofstream ref2(dir + "/ref/pair.tsv");
        ref2 << "0\t10\tA\n10\t20\tB\n";
        std::ofstream est(dir + "/est/pair.csv");
        est << "beat_index,time_sec\n20,10.0\n";
        std::ofstream est2(dir + "/est/only_est.csv");
        est2 << "beat_index,time_sec\n20,10.0\n";
    }
    REQUIRE(cli("eval " + dir + "/est " + dir + "/ref " + dir + "/r.json") ==
            0);
    const std::string report = slurp(dir + "/r.json");
    CHECK(report.find("missing boundary") != std::string::npos); // only_ref
    CHECK(report.find("missing reference") != std::string::npos); // only_est
    CHECK(report.find("\"id\": \"pair\"") != std::string::npos);
    CHECK(report.find("\"evaluated\": 1") != std::string::npos);
}
