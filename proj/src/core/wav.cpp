#include "wav.hpp"

#include "errors.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace segbed::wav {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) |
           static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 |
           static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>(v >> 8 & 0xFF));
    out.push_back(static_cast<unsigned char>(v >> 16 & 0xFF));
    out.push_back(static_cast<unsigned char>(v >> 24 & 0xFF));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>(v >> 8 & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

} // namespace

WavData read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io_failure, "cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        raise(ErrorCode::unsupported_format, path + " is not a RIFF/WAVE file");
    }

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::uint32_t data_size = 0;
    bool have_fmt = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        std::uint32_t chunk_size = read_u32(hdr + 4);
        const std::size_t body = pos + 8;
        if (body + chunk_size > bytes.size()) {
            chunk_size = static_cast<std::uint32_t>(bytes.size() - body);
        }
        if (std::memcmp(hdr, "fmt ", 4) == 0 && chunk_size >= 16) {
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            // WAVE_FORMAT_EXTENSIBLE carries the real format in the GUID.
            if (format == kFormatExtensible && chunk_size >= 26) {
                format = read_u16(bytes.data() + body + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = chunk_size;
        }
        pos = body + chunk_size + (chunk_size & 1);
    }

    if (!have_fmt || data == nullptr) {
        raise(ErrorCode::unsupported_format, path + ": missing fmt or data chunk");
    }
    if (channels != 1 && channels != 2) {
        raise(ErrorCode::unsupported_format,
              path + ": unsupported channel count " + std::to_string(channels));
    }
    const bool pcm16 = format == kFormatPcm && bits == 16;
    const bool f32 = format == kFormatFloat && bits == 32;
    if (!pcm16 && !f32) {
        raise(ErrorCode::unsupported_format,
              path + ": only PCM16 and float32 are supported");
    }

    WavData out;
    out.channels = channels;
    out.sample_rate = static_cast<int>(rate);
    const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
    const std::size_t n = data_size / bytes_per_sample;
    out.interleaved.resize(n);
    if (pcm16) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::int16_t s = static_cast<std::int16_t>(
                read_u16(data + 2 * i));
            out.interleaved[i] = static_cast<float>(s) / 32768.0f;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t u = read_u32(data + 4 * i);
            float f;
            std::memcpy(&f, &u, 4);
            out.interleaved[i] = f;
        }
    }
    if (out.interleaved.empty()) {
        raise(ErrorCode::empty_audio, path + ": no samples");
    }
    return out;
}

void write(const std::string& path, const std::vector<float>& interleaved,
           int channels, int sample_rate, SampleFormat format) {
    if (channels < 1 || sample_rate <= 0 ||
        interleaved.size() % static_cast<std::size_t>(channels) != 0) {
        raise(ErrorCode::invalid_argument, "bad wav write parameters");
    }
    const bool pcm16 = format == SampleFormat::pcm16;
    const std::uint16_t bits = pcm16 ? 16 : 32;
    const std::uint32_t data_size =
        static_cast<std::uint32_t>(interleaved.size() * (pcm16 ? 2 : 4));

    std::vector<unsigned char> out;
    out.reserve(44 + data_size);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_size);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, pcm16 ? kFormatPcm : kFormatFloat);
    put_u16(out, static_cast<std::uint16_t>(channels));
    put_u32(out, static_cast<std::uint32_t>(sample_rate));
    const std::uint32_t block = static_cast<std::uint32_t>(channels) * bits / 8;
    put_u32(out, static_cast<std::uint32_t>(sample_rate) * block);
    put_u16(out, static_cast<std::uint16_t>(block));
    put_u16(out, bits);
    put_tag(out, "data");
    put_u32(out, data_size);

    if (pcm16) {
        for (float v : interleaved) {
            float c = v;
            if (c > 1.0f) c = 1.0f;
            if (c < -1.0f) c = -1.0f;
            const int s = static_cast<int>(std::lround(c * 32767.0));
            put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(s)));
        }
    } else {
        for (float v : interleaved) {
            std::uint32_t u;
            std::memcpy(&u, &v, 4);
            put_u32(out, u);
        }
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) raise(ErrorCode::io_failure, "cannot write " + path);
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    if (!f) raise(ErrorCode::io_failure, "short write to " + path);
}

} // namespace segbed::wav
