#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace segbed::fft {

// Complex FFT of arbitrary length: radix-2 for powers of two, Bluestein's
// chirp-z algorithm otherwise. Plans precompute twiddles and (for Bluestein)
// the chirp kernel spectrum; a plan is reusable but not thread-shared.
class Plan {
public:
    explicit Plan(std::size_t n);

    std::size_t size() const { return n_; }

    // In-place transform of exactly size() elements.
    void forward(std::complex<double>* data) const;
    void inverse(std::complex<double>* data) const; // includes the 1/n scale

private:
    void pow2_transform(std::complex<double>* data) const;

    std::size_t n_ = 0;
    bool is_pow2_ = false;

    // radix-2 tables (for n_ itself, or the Bluestein work size)
    std::size_t work_n_ = 0;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> twiddle_;

    // Bluestein
    std::vector<std::complex<double>> chirp_;        // exp(-i*pi*k^2/n)
    std::vector<std::complex<double>> kernel_fft_;   // FFT of wrapped conj chirp
};

std::vector<std::complex<double>> transform(
    const std::vector<std::complex<double>>& input, bool inverse = false);

} // namespace segbed::fft
