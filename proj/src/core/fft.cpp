#include "fft.hpp"

#include "errors.hpp"

#include <cmath>

namespace segbed::fft {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace

Plan::Plan(std::size_t n) : n_(n) {
    if (n == 0) raise(ErrorCode::invalid_argument, "fft size must be positive");
    is_pow2_ = is_power_of_two(n);
    work_n_ = is_pow2_ ? n : next_power_of_two(2 * n - 1);

    bitrev_.resize(work_n_);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < work_n_) ++log2n;
    for (std::size_t i = 0; i < work_n_; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b) {
            r |= ((i >> b) & 1) << (log2n - 1 - b);
        }
        bitrev_[i] = r;
    }
    twiddle_.resize(work_n_ / 2);
    for (std::size_t k = 0; k < work_n_ / 2; ++k) {
        const double a = -2.0 * kPi * static_cast<double>(k) / work_n_;
        twiddle_[k] = {std::cos(a), std::sin(a)};
    }

    if (!is_pow2_) {
        chirp_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            // k^2 mod 2n keeps the phase argument small and exact.
            const std::size_t k2 = (k * k) % (2 * n_);
            const double a = -kPi * static_cast<double>(k2) / n_;
            chirp_[k] = {std::cos(a), std::sin(a)};
        }
        std::vector<std::complex<double>> kernel(work_n_, {0.0, 0.0});
        kernel[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n_; ++k) {
            kernel[k] = std::conj(chirp_[k]);
            kernel[work_n_ - k] = std::conj(chirp_[k]);
        }
        pow2_transform(kernel.data());
        kernel_fft_ = std::move(kernel);
    }
}

void Plan::pow2_transform(std::complex<double>* data) const {
    const std::size_t n = work_n_;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = bitrev_[i];
        if (j > i) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const std::complex<double> w = twiddle_[k * step];
                const std::complex<double> u = data[start + k];
                const std::complex<double> v = data[start + k + half] * w;
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
    }
}

void Plan::forward(std::complex<double>* data) const {
    if (is_pow2_) {
        pow2_transform(data);
        return;
    }
    // Bluestein: X[k] = chirp[k] * ((x .* chirp) (*) conj-chirp)[k]
    std::vector<std::complex<double>> work(work_n_, {0.0, 0.0});
    for (std::size_t k = 0; k < n_; ++k) work[k] = data[k] * chirp_[k];
    pow2_transform(work.data());
    for (std::size_t k = 0; k < work_n_; ++k) work[k] *= kernel_fft_[k];
    // inverse pow2 transform via conjugation
    for (auto& v : work) v = std::conj(v);
    pow2_transform(work.data());
    const double scale = 1.0 / static_cast<double>(work_n_);
    for (std::size_t k = 0; k < n_; ++k) {
        data[k] = std::conj(work[k]) * scale * chirp_[k];
    }
}

void Plan::inverse(std::complex<double>* data) const {
    for (std::size_t k = 0; k < n_; ++k) data[k] = std::conj(data[k]);
    forward(data);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 0; k < n_; ++k) data[k] = std::conj(data[k]) * scale;
}

std::vector<std::complex<double>> transform(
    const std::vector<std::complex<double>>& input, bool inverse) {
    Plan plan(input.size());
    std::vector<std::complex<double>> out = input;
    if (inverse) {
        plan.inverse(out.data());
    } else {
        plan.forward(out.data());
    }
    return out;
}

} // namespace segbed::fft
