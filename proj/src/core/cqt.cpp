#include "cqt.hpp"

#include "errors.hpp"

#include <cmath>

namespace segbed {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct BinKernel {
    int half = 0;               // window half length; full length 2*half + 1
    std::vector<float> re;      // window * cos(-2*pi*f*(j - half)/sr)
    std::vector<float> im;
    float scale = 0.0f;         // 2 / sum(window)
};

BinKernel make_kernel(double freq, double quality, int sample_rate) {
    const double raw_len = quality * sample_rate / freq;
    int half = static_cast<int>(std::floor(raw_len / 2.0));
    if (half < 1) half = 1;
    const int len = 2 * half + 1;

    BinKernel k;
    k.half = half;
    k.re.resize(len);
    k.im.resize(len);
    double window_sum = 0.0;
    const double omega = 2.0 * kPi * freq / sample_rate;
    for (int j = 0; j < len; ++j) {
        const double u = static_cast<double>(j) / (len - 1);
        const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * u); // Hann
        const double phase = -omega * (j - half);
        k.re[j] = static_cast<float>(w * std::cos(phase));
        k.im[j] = static_cast<float>(w * std::sin(phase));
        window_sum += w;
    }
    k.scale = static_cast<float>(2.0 / window_sum);
    return k;
}

} // namespace

void CqtParams::validate(int sample_rate) const {
    if (f_min <= 0.0 || bins_per_octave < 1 || n_octaves < 1) {
        raise(ErrorCode::invalid_argument, "bad CQT parameters");
    }
    if (bin_frequency(bins() - 1) >= 0.5 * sample_rate) {
        raise(ErrorCode::invalid_argument,
              "highest CQT bin exceeds the Nyquist frequency");
    }
}

CqtMatrix cqt_at_times(const AudioBuffer& audio, const CqtParams& params,
                       const std::vector<double>& centers) {
    params.validate(audio.sample_rate);
    const double duration = audio.duration_sec();
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (centers[i] < 0.0 || centers[i] > duration + 1e-9) {
            raise(ErrorCode::out_of_range, "CQT center out of range");
        }
        if (i > 0 && centers[i] < centers[i - 1]) {
            raise(ErrorCode::invalid_argument, "CQT centers must be ascending");
        }
    }

    const int n_bins = params.bins();
    std::vector<BinKernel> kernels;
    kernels.reserve(n_bins);
    for (int k = 0; k < n_bins; ++k) {
        kernels.push_back(make_kernel(params.bin_frequency(k), params.quality(),
                                      audio.sample_rate));
    }

    CqtMatrix out;
    out.bins = n_bins;
    out.frame_centers = centers;
    out.magnitudes.assign(centers.size() * static_cast<std::size_t>(n_bins),
                          0.0f);

    const float* x = audio.samples.data();
    const long n = static_cast<long>(audio.samples.size());
    for (std::size_t f = 0; f < centers.size(); ++f) {
        const long c = std::lround(centers[f] * audio.sample_rate);
        float* row = out.magnitudes.data() + f * static_cast<std::size_t>(n_bins);
        for (int k = 0; k < n_bins; ++k) {
            const BinKernel& ker = kernels[static_cast<std::size_t>(k)];
            const long lo = c - ker.half;
            const long hi = c + ker.half; // inclusive
            const long first = std::max(lo, 0L);
            const long last = std::min(hi, n - 1);
            if (first > last) continue; // window fully outside: zero frame
            const long off = first - lo;
            const float* xs = x + first;
            const float* kr = ker.re.data() + off;
            const float* ki = ker.im.data() + off;
            const long len = last - first + 1;
            float acc_re = 0.0f, acc_im = 0.0f;
            for (long j = 0; j < len; ++j) {
                acc_re += xs[j] * kr[j];
                acc_im += xs[j] * ki[j];
            }
            row[k] = ker.scale *
                     std::sqrt(acc_re * acc_re + acc_im * acc_im);
        }
    }
    return out;
}

CqtMatrix cqt_fixed_hop(const AudioBuffer& audio, const CqtParams& params,
                        double hop_sec) {
    if (hop_sec <= 0.0) {
        raise(ErrorCode::invalid_argument, "hop must be positive");
    }
    const double duration = audio.duration_sec();
    const std::size_t n_frames =
        static_cast<std::size_t>(std::floor(duration / hop_sec + 1e-9)) + 1;
    std::vector<double> centers(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        centers[i] = std::min(static_cast<double>(i) * hop_sec, duration);
    }
    return cqt_at_times(audio, params, centers);
}

} // namespace segbed
