#include "resample.hpp"

#include "errors.hpp"

#include <cmath>
#include <cstdint>

namespace segbed {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kLobes = 16;

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

} // namespace

std::vector<float> resample(const std::vector<float>& input, int from_rate,
                            int to_rate) {
    if (from_rate <= 0 || to_rate <= 0) {
        raise(ErrorCode::invalid_argument, "sample rates must be positive");
    }
    if (from_rate == to_rate || input.empty()) return input;

    const double ratio = static_cast<double>(to_rate) / from_rate;
    // Cutoff slightly under the narrower Nyquist, in input-sample units.
    const double cutoff = 0.5 * std::min(1.0, ratio) * 0.95;
    const int half_width = static_cast<int>(std::ceil(kLobes / (2.0 * cutoff)));

    const std::int64_t n_in = static_cast<std::int64_t>(input.size());
    const std::int64_t n_out = static_cast<std::int64_t>(
        std::llround(static_cast<double>(n_in) * to_rate / from_rate));

    std::vector<float> out(static_cast<std::size_t>(n_out));
    for (std::int64_t m = 0; m < n_out; ++m) {
        const double t = static_cast<double>(m) / ratio; // position in input
        const std::int64_t center = static_cast<std::int64_t>(std::floor(t));
        double acc = 0.0;
        for (std::int64_t k = center - half_width; k <= center + half_width + 1;
             ++k) {
            if (k < 0 || k >= n_in) continue;
            const double u = t - static_cast<double>(k);
            const double window =
                0.5 + 0.5 * std::cos(kPi * u / (half_width + 1));
            acc += input[static_cast<std::size_t>(k)] * 2.0 * cutoff *
                   sinc(2.0 * cutoff * u) * window;
        }
        out[static_cast<std::size_t>(m)] = static_cast<float>(acc);
    }
    return out;
}

} // namespace segbed
