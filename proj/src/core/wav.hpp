#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace segbed::wav {

struct WavData {
    std::vector<float> interleaved;
    int channels = 0;
    int sample_rate = 0;

    std::size_t frames() const {
        return channels > 0 ? interleaved.size() / channels : 0;
    }
};

// RIFF/WAVE reader for PCM16 little-endian and IEEE float32, 1 or 2
// channels. Anything else raises unsupported_format.
WavData read(const std::string& path);

enum class SampleFormat { pcm16, float32 };

void write(const std::string& path, const std::vector<float>& interleaved,
           int channels, int sample_rate,
           SampleFormat format = SampleFormat::pcm16);

} // namespace segbed::wav
