#include "twodfft.hpp"

#include "errors.hpp"
#include "fft.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

namespace segbed {

namespace {

// Plans are reused per thread; Bluestein sizes precompute a chirp kernel
// that is costly to rebuild on every call.
const fft::Plan& cached_plan(std::size_t n) {
    thread_local std::vector<std::unique_ptr<fft::Plan>> plans;
    for (const auto& p : plans) {
        if (p->size() == n) return *p;
    }
    plans.push_back(std::make_unique<fft::Plan>(n));
    return *plans.back();
}

} // namespace

std::vector<float> twodfft_feature(const std::vector<float>& values,
                                   std::size_t time_rows,
                                   std::size_t freq_cols) {
    if (time_rows == 0 || freq_cols == 0 ||
        values.size() != time_rows * freq_cols) {
        raise(ErrorCode::shape_mismatch, "2D-FFT input shape mismatch");
    }
    constexpr double kEps = 1e-6;

    std::vector<std::complex<double>> grid(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        grid[i] = {static_cast<double>(values[i]), 0.0};
    }

    const fft::Plan& row_plan = cached_plan(freq_cols);
    for (std::size_t t = 0; t < time_rows; ++t) {
        row_plan.forward(grid.data() + t * freq_cols);
    }
    const fft::Plan& col_plan = cached_plan(time_rows);
    std::vector<std::complex<double>> column(time_rows);
    for (std::size_t k = 0; k < freq_cols; ++k) {
        for (std::size_t t = 0; t < time_rows; ++t) {
            column[t] = grid[t * freq_cols + k];
        }
        col_plan.forward(column.data());
        for (std::size_t t = 0; t < time_rows; ++t) {
            grid[t * freq_cols + k] = column[t];
        }
    }

    std::vector<float> out(values.size());
    for (std::size_t k = 0; k < freq_cols; ++k) {
        for (std::size_t t = 0; t < time_rows; ++t) {
            out[k * time_rows + t] = static_cast<float>(
                std::log(std::abs(grid[t * freq_cols + k]) + kEps));
        }
    }
    return out;
}

} // namespace segbed
