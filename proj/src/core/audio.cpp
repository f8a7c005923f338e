#include "audio.hpp"

#include "errors.hpp"
#include "resample.hpp"
#include "wav.hpp"

#include <cmath>

namespace segbed {

namespace {

AudioBuffer finalize(std::vector<float> mono, int source_rate,
                     int target_rate) {
    if (mono.empty()) raise(ErrorCode::empty_audio, "no samples");
    if (target_rate <= 0) {
        raise(ErrorCode::invalid_argument, "target rate must be positive");
    }
    AudioBuffer out;
    out.sample_rate = target_rate;
    out.samples = source_rate == target_rate
                      ? std::move(mono)
                      : resample(mono, source_rate, target_rate);
    if (out.samples.empty()) raise(ErrorCode::empty_audio, "resampled to zero length");

    float peak = 0.0f;
    for (float s : out.samples) peak = std::max(peak, std::abs(s));
    if (peak > 1.0f) {
        const float inv = 1.0f / peak;
        for (float& s : out.samples) s *= inv;
    }
    return out;
}

} // namespace

AudioBuffer load_audio(const std::string& path, int target_rate) {
    wav::WavData raw = wav::read(path);
    std::vector<float> mono;
    if (raw.channels == 1) {
        mono = std::move(raw.interleaved);
    } else {
        const std::size_t frames = raw.frames();
        mono.resize(frames);
        for (std::size_t i = 0; i < frames; ++i) {
            mono[i] = 0.5f * (raw.interleaved[2 * i] + raw.interleaved[2 * i + 1]);
        }
    }
    return finalize(std::move(mono), raw.sample_rate, target_rate);
}

AudioBuffer audio_from_samples(std::vector<float> samples, int source_rate,
                               int target_rate) {
    if (source_rate <= 0) {
        raise(ErrorCode::invalid_argument, "source rate must be positive");
    }
    return finalize(std::move(samples), source_rate, target_rate);
}

} // namespace segbed
