#pragma once

#include <string>
#include <vector>

namespace segbed {

// Mono audio at a known rate, samples nominally in [-1, 1].
struct AudioBuffer {
    std::vector<float> samples;
    int sample_rate = 0;

    double duration_sec() const {
        return sample_rate > 0
                   ? static_cast<double>(samples.size()) / sample_rate
                   : 0.0;
    }
};

// Decode a WAV file (PCM16 or float32, mono/stereo), average-downmix stereo,
// resample to target_rate, peak-normalize only when some |sample| > 1.
AudioBuffer load_audio(const std::string& path, int target_rate);

// Same pipeline for samples already in memory (synthetic inputs, tests).
AudioBuffer audio_from_samples(std::vector<float> samples, int source_rate,
                               int target_rate);

} // namespace segbed
