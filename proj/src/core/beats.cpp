#include "beats.hpp"

#include "errors.hpp"
#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

namespace segbed {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kFrameLen = 1024;
constexpr int kHop = 256;
constexpr double kFallbackBpm = 120.0;
constexpr double kMinBpm = 60.0;
constexpr double kMaxBpm = 180.0;
constexpr double kTempoPriorOctaveSigma = 0.4;
constexpr double kDpTightness = 100.0;

// Half-wave-rectified spectral flux of log-compressed magnitudes.
std::vector<double> onset_envelope(const AudioBuffer& audio) {
    const std::size_t n = audio.samples.size();
    if (n < kFrameLen) return {};
    const std::size_t n_frames = 1 + (n - kFrameLen) / kHop;

    std::vector<double> window(kFrameLen);
    for (int i = 0; i < kFrameLen; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (kFrameLen - 1));
    }

    fft::Plan plan(kFrameLen);
    std::vector<std::complex<double>> buf(kFrameLen);
    std::vector<double> prev(kFrameLen / 2 + 1, 0.0);
    std::vector<double> cur(kFrameLen / 2 + 1, 0.0);
    std::vector<double> envelope(n_frames, 0.0);

    for (std::size_t f = 0; f < n_frames; ++f) {
        const float* x = audio.samples.data() + f * kHop;
        for (int i = 0; i < kFrameLen; ++i) {
            buf[i] = {x[i] * window[i], 0.0};
        }
        plan.forward(buf.data());
        double flux = 0.0;
        for (int k = 0; k <= kFrameLen / 2; ++k) {
            cur[k] = std::log1p(100.0 * std::abs(buf[k]));
            if (f > 0) flux += std::max(0.0, cur[k] - prev[k]);
        }
        envelope[f] = flux;
        std::swap(prev, cur);
    }
    return envelope;
}

// Autocorrelation tempo pick over the BPM range, weighted by a log-Gaussian
// prior centered on 120 BPM.
int estimate_period_hops(const std::vector<double>& env, double hop_sec) {
    const int min_lag =
        std::max(1, static_cast<int>(std::floor(60.0 / kMaxBpm / hop_sec)));
    const int max_lag = static_cast<int>(std::ceil(60.0 / kMinBpm / hop_sec));
    if (static_cast<int>(env.size()) <= max_lag + 1) return 0;

    double best = -1.0;
    int best_lag = 0;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
        double ac = 0.0;
        for (std::size_t t = 0; t + lag < env.size(); ++t) {
            ac += env[t] * env[t + lag];
        }
        const double period = lag * hop_sec;
        const double octaves = std::log2(period / (60.0 / kFallbackBpm));
        const double prior =
            std::exp(-0.5 * octaves * octaves /
                     (kTempoPriorOctaveSigma * kTempoPriorOctaveSigma));
        const double score = ac * prior;
        if (score > best) {
            best = score;
            best_lag = lag;
        }
    }
    return best_lag;
}

// Ellis-style dynamic program: cumulative score with a squared-log penalty
// for deviating from the estimated period.
std::vector<int> dp_beats(const std::vector<double>& env, int period) {
    const int n = static_cast<int>(env.size());
    const int lo = std::max(1, period / 2);
    const int hi = std::min(n - 1, period * 2);

    std::vector<double> score(env.begin(), env.end());
    std::vector<int> backlink(n, -1);
    for (int t = 0; t < n; ++t) {
        double best = 0.0;
        int best_prev = -1;
        for (int tau = lo; tau <= hi; ++tau) {
            const int prev = t - tau;
            if (prev < 0) break;
            const double dev = std::log(static_cast<double>(tau) / period);
            const double candidate = score[prev] - kDpTightness * dev * dev;
            if (candidate > best) {
                best = candidate;
                best_prev = prev;
            }
        }
        if (best_prev >= 0) {
            score[t] += best;
            backlink[t] = best_prev;
        }
    }

    // Start the backtrace at the best score near the end of the track.
    int start = n - 1;
    const int tail_from = std::max(0, n - 1 - period);
    for (int t = tail_from; t < n; ++t) {
        if (score[t] > score[start]) start = t;
    }

    std::vector<int> beats;
    for (int t = start; t >= 0; t = backlink[t]) {
        beats.push_back(t);
        if (backlink[t] < 0) break;
    }
    std::reverse(beats.begin(), beats.end());
    return beats;
}

} // namespace

BeatGrid uniform_beat_grid(double duration_sec, double bpm) {
    BeatGrid grid;
    const double period = 60.0 / bpm;
    for (double t = 0.0; t <= duration_sec - 0.5 * period; t += period) {
        grid.beat_times.push_back(t);
    }
    if (grid.beat_times.empty()) grid.beat_times.push_back(0.0);
    return grid;
}

BeatGrid track_beats(const AudioBuffer& audio) {
    if (audio.samples.empty()) {
        raise(ErrorCode::empty_audio, "cannot track beats of empty audio");
    }
    const double duration = audio.duration_sec();
    const double hop_sec =
        static_cast<double>(kHop) / audio.sample_rate;

    std::vector<double> env = onset_envelope(audio);
    double mean = 0.0;
    for (double v : env) mean += v;
    if (!env.empty()) mean /= static_cast<double>(env.size());
    double variance = 0.0;
    for (double v : env) variance += (v - mean) * (v - mean);
    if (!env.empty()) variance /= static_cast<double>(env.size());
    const double stddev = std::sqrt(variance);

    if (env.size() < 4 || stddev < 1e-9) {
        return uniform_beat_grid(duration, kFallbackBpm);
    }
    for (double& v : env) v = (v - mean) / stddev;

    const int period = estimate_period_hops(env, hop_sec);
    if (period <= 0) return uniform_beat_grid(duration, kFallbackBpm);

    const std::vector<int> beat_hops = dp_beats(env, period);
    if (beat_hops.size() < 2) return uniform_beat_grid(duration, kFallbackBpm);

    BeatGrid grid;
    grid.beat_times.reserve(beat_hops.size());
    // Frame f covers samples [f*hop, f*hop + frame); its energy centroid sits
    // half a frame in, which lines onset peaks up with the audible attack.
    const double frame_center = 0.5 * kFrameLen / audio.sample_rate;
    for (int f : beat_hops) {
        const double t = f * hop_sec + frame_center;
        if (t <= duration) grid.beat_times.push_back(t);
    }
    if (grid.beat_times.size() < 2) {
        return uniform_beat_grid(duration, kFallbackBpm);
    }
    return grid;
}

BeatGrid read_beats_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io_failure, "cannot open " + path);
    BeatGrid grid;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        std::istringstream ss(trimmed);
        double t;
        if (!(ss >> t)) {
            raise(ErrorCode::parse_error,
                  path + ":" + std::to_string(line_no) + ": not a beat time");
        }
        if (!grid.beat_times.empty() && t <= grid.beat_times.back()) {
            raise(ErrorCode::parse_error,
                  path + ": beat times must be strictly increasing");
        }
        grid.beat_times.push_back(t);
    }
    return grid;
}

void write_beats_file(const BeatGrid& beats, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path);
    out.precision(9);
    for (double t : beats.beat_times) out << t << "\n";
}

} // namespace segbed
