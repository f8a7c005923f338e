#include "synth.hpp"

#include "errors.hpp"
#include "wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

namespace segbed {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kBeatsPerBar = 4;
constexpr int kSlotsPerBar = 8;    // eighth notes
constexpr int kChordsPerCycle = 4; // fixed loop, one chord per bar

double midi_to_hz(double midi) {
    return 440.0 * std::pow(2.0, (midi - 69.0) / 12.0);
}

// A texture is one synthetic "instrument plus part": register, a fixed
// 4-bar chord loop, partial structure, an eighth-note rhythm and decay.
// Within a section the only variation is light per-note humanization; the
// 16-beat chord loop matches the patch span, so nearby patches repeat.
struct Texture {
    double base_midi = 48.0;
    std::vector<std::vector<double>> chords; // kChordsPerCycle triads
    std::vector<double> partials;            // amplitude per harmonic
    std::uint32_t rhythm_mask = 0;           // kSlotsPerBar bits, bit 0 set
    bool octave_layer = false;
    double note_decay_sec = 0.25;
    double click_level = 0.25;
    double level = 0.2;
};

Texture make_texture(Rng& rng) {
    Texture t;
    t.base_midi = static_cast<double>(rng.next_int(40, 64));

    const int major[7] = {0, 2, 4, 5, 7, 9, 11};
    for (int c = 0; c < kChordsPerCycle; ++c) {
        const int degree = major[rng.next_int(0, 6)];
        const bool minor_third = rng.next_double() < 0.5;
        t.chords.push_back({static_cast<double>(degree),
                            static_cast<double>(degree + (minor_third ? 3 : 4)),
                            static_cast<double>(degree + 7)});
    }

    const int n_partials = static_cast<int>(rng.next_int(2, 6));
    const double decay = rng.next_double(0.3, 0.8);
    const bool odd_only = rng.next_double() < 0.3;
    double a = 1.0;
    for (int h = 1; h <= n_partials; ++h) {
        const bool muted = odd_only && h % 2 == 0;
        t.partials.push_back(muted ? 0.0 : a);
        a *= decay;
    }

    t.rhythm_mask = 1; // downbeat
    for (int s = 1; s < kSlotsPerBar; ++s) {
        if (rng.next_double() < 0.55) t.rhythm_mask |= 1u << s;
    }

    t.octave_layer = rng.next_double() < 0.35;
    t.note_decay_sec = rng.next_double(0.15, 0.4);
    t.click_level = rng.next_double(0.15, 0.35);
    t.level = rng.next_double(0.14, 0.22);
    return t;
}

void render_note(std::vector<float>& out, int sample_rate, double start_sec,
                 double freq_hz, double amp, double decay_sec,
                 const std::vector<double>& partials) {
    const double dur = std::min(0.5, 4.0 * decay_sec);
    const long start = std::lround(start_sec * sample_rate);
    const long len = std::lround(dur * sample_rate);
    const double nyquist = 0.5 * sample_rate;
    for (std::size_t h = 0; h < partials.size(); ++h) {
        const double f = freq_hz * static_cast<double>(h + 1);
        if (partials[h] <= 0.0 || f >= 0.9 * nyquist) continue;
        const double w = 2.0 * kPi * f / sample_rate;
        const double a = amp * partials[h];
        for (long i = 0; i < len; ++i) {
            const long idx = start + i;
            if (idx < 0 || idx >= static_cast<long>(out.size())) break;
            const double tt = static_cast<double>(i) / sample_rate;
            const double env =
                std::exp(-tt / decay_sec) * (1.0 - std::exp(-tt / 0.004));
            out[static_cast<std::size_t>(idx)] +=
                static_cast<float>(a * env * std::sin(w * i));
        }
    }
}

void render_click(std::vector<float>& out, int sample_rate, double start_sec,
                  double level, Rng& rng) {
    const long start = std::lround(start_sec * sample_rate);
    const long len = 200;
    for (long i = 0; i < len; ++i) {
        const long idx = start + i;
        if (idx < 0 || idx >= static_cast<long>(out.size())) break;
        const double env = std::exp(-static_cast<double>(i) / 30.0);
        out[static_cast<std::size_t>(idx)] +=
            static_cast<float>(level * env * rng.next_double(-1.0, 1.0));
    }
}

} // namespace

SynthTrack synth_track(std::uint64_t seed, const SynthParams& params) {
    if (params.n_segments_min < 1 ||
        params.n_segments_max < params.n_segments_min ||
        params.seg_len_min_beats < kBeatsPerBar ||
        params.seg_len_max_beats < params.seg_len_min_beats ||
        params.tempo_bpm <= 0.0 || params.sample_rate <= 0) {
        raise(ErrorCode::invalid_argument, "bad synthesis parameters");
    }
    Rng rng(seed * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull);

    const int n_textures = static_cast<int>(
        rng.next_int(params.n_textures_min, params.n_textures_max));
    std::vector<Texture> textures;
    for (int i = 0; i < n_textures; ++i) textures.push_back(make_texture(rng));

    const int n_segments = static_cast<int>(
        rng.next_int(params.n_segments_min, params.n_segments_max));
    std::vector<int> seg_beats(static_cast<std::size_t>(n_segments));
    std::vector<int> seg_texture(static_cast<std::size_t>(n_segments));
    int total_beats = 0;
    int prev_texture = -1;
    for (int s = 0; s < n_segments; ++s) {
        const int bars_min = params.seg_len_min_beats / kBeatsPerBar;
        const int bars_max = params.seg_len_max_beats / kBeatsPerBar;
        seg_beats[s] = kBeatsPerBar * static_cast<int>(
                           rng.next_int(bars_min, bars_max));
        int tex;
        do {
            tex = static_cast<int>(rng.next_int(0, n_textures - 1));
        } while (n_textures > 1 && tex == prev_texture);
        seg_texture[s] = tex;
        prev_texture = tex;
        total_beats += seg_beats[s];
    }

    const double beat_sec = 60.0 / params.tempo_bpm;
    const double duration = total_beats * beat_sec;

    SynthTrack track;
    track.sample_rate = params.sample_rate;
    track.total_beats = total_beats;
    track.samples.assign(
        static_cast<std::size_t>(std::lround(duration * params.sample_rate)),
        0.0f);

    int beat_cursor = 0;
    for (int s = 0; s < n_segments; ++s) {
        const Texture& tex = textures[static_cast<std::size_t>(seg_texture[s])];
        for (int b = 0; b < seg_beats[s]; ++b) {
            const int global_beat = beat_cursor + b;
            const double beat_time = global_beat * beat_sec;
            render_click(track.samples, params.sample_rate, beat_time,
                         tex.click_level, rng);

            const int bar_in_seg = b / kBeatsPerBar;
            const int beat_in_bar = b % kBeatsPerBar;
            const auto& chord =
                tex.chords[static_cast<std::size_t>(bar_in_seg %
                                                    kChordsPerCycle)];

            for (int half = 0; half < 2; ++half) {
                const int slot = 2 * beat_in_bar + half;
                if (!(tex.rhythm_mask & (1u << slot))) continue;
                const double t0 = beat_time + half * 0.5 * beat_sec;
                for (double offset : chord) {
                    // light per-note humanization, no structured cycles
                    const double gain = tex.level * rng.next_double(0.9, 1.1);
                    const double f = midi_to_hz(tex.base_midi + offset);
                    render_note(track.samples, params.sample_rate, t0, f, gain,
                                tex.note_decay_sec, tex.partials);
                    if (tex.octave_layer) {
                        render_note(track.samples, params.sample_rate, t0,
                                    2.0 * f, 0.5 * gain, tex.note_decay_sec,
                                    tex.partials);
                    }
                }
            }
        }

        AnnotatedInterval iv;
        iv.start = beat_cursor * beat_sec;
        iv.end = (beat_cursor + seg_beats[s]) * beat_sec;
        iv.label = std::string(1, static_cast<char>('A' + seg_texture[s]));
        track.annotations.intervals.push_back(std::move(iv));
        beat_cursor += seg_beats[s];
    }
    track.annotations.duration_sec = duration;

    float peak = 0.0f;
    for (float v : track.samples) peak = std::max(peak, std::abs(v));
    if (peak > 0.95f) {
        const float scale = 0.95f / peak;
        for (float& v : track.samples) v *= scale;
    }
    return track;
}

std::vector<std::string> synth_corpus(const std::string& out_dir, int n_tracks,
                                      std::uint64_t seed,
                                      const SynthParams& params) {
    if (n_tracks < 1) {
        raise(ErrorCode::invalid_argument, "need at least one track");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) raise(ErrorCode::io_failure, "cannot create " + out_dir);

    std::vector<std::string> stems;
    for (int i = 0; i < n_tracks; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "track_%03d", i);
        const SynthTrack track =
            synth_track(seed + static_cast<std::uint64_t>(i), params);
        const std::string base = out_dir + "/" + name;
        wav::write(base + ".wav", track.samples, 1, track.sample_rate,
                   wav::SampleFormat::pcm16);
        write_annotations(track.annotations, base + ".tsv");
        stems.emplace_back(name);
    }
    return stems;
}

} // namespace segbed
