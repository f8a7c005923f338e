#pragma once

#include "core/fft.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace testutil {

inline std::vector<float> sine(double freq, double seconds, int rate,
                               double amplitude = 1.0, double phase = 0.0) {
    const std::size_t n = static_cast<std::size_t>(seconds * rate);
    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<float>(
            amplitude * std::sin(2.0 * M_PI * freq * i / rate + phase));
    }
    return out;
}

inline double rms(const std::vector<float>& x) {
    double acc = 0.0;
    for (float v : x) acc += static_cast<double>(v) * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

// Dominant frequency by FFT peak with quadratic interpolation on the
// log-magnitude spectrum.
inline double peak_frequency(const std::vector<float>& x, int rate) {
    std::size_t n = 1;
    while (n * 2 <= x.size()) n *= 2;
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (n - 1));
        buf[i] = {x[i] * w, 0.0};
    }
    segbed::fft::Plan plan(n);
    plan.forward(buf.data());
    std::size_t best = 1;
    for (std::size_t k = 1; k + 1 < n / 2; ++k) {
        if (std::abs(buf[k]) > std::abs(buf[best])) best = k;
    }
    const double a = std::log(std::abs(buf[best - 1]) + 1e-30);
    const double b = std::log(std::abs(buf[best]) + 1e-30);
    const double c = std::log(std::abs(buf[best + 1]) + 1e-30);
    const double denom = a - 2.0 * b + c;
    const double shift = std::abs(denom) > 1e-12 ? 0.5 * (a - c) / denom : 0.0;
    return (static_cast<double>(best) + shift) * rate / static_cast<double>(n);
}

// Fresh scratch directory under the test working directory.
inline std::string scratch_dir(const std::string& name) {
    const std::filesystem::path dir =
        std::filesystem::path("scratch") / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

} // namespace testutil

#include "core/loss.hpp"
#include "core/nn.hpp"
#include "core/rng.hpp"

namespace testutil {

// Central finite differences against the analytic backward pass on a
// miniature double-precision network (2 conv layers, 8x6 input, D=4).
// Returns the worst relative error across all parameters and draws. The
// denominator floor absorbs FD cancellation noise (~1e-8 here) on
// parameters whose true gradient is zero (dead ReLU paths).
inline double gradcheck_max_rel_error(int draws, std::uint64_t seed = 12345) {
    segbed::nn::ArchConfig arch;
    arch.input_rows = 8;
    arch.input_cols = 6;
    arch.convs = {{3, 2, 2, true}, {2, 2, 3, false}};
    arch.dense_units = 5;
    arch.embedding_dim = 4;
    const std::size_t D = 4;
    segbed::Rng rng(seed);

    double worst = 0.0;
    for (int draw = 0; draw < draws; ++draw) {
        segbed::nn::Network<double> net(arch);
        net.init_he(rng);
        auto ws_a = net.make_workspace();
        auto ws_p = net.make_workspace();
        auto ws_n = net.make_workspace();

        auto random_patch = [&]() {
            std::vector<double> p(8 * 6);
            for (auto& v : p) v = rng.next_double(-1.5, 1.5);
            return p;
        };
        const auto pa = random_patch();
        const auto pp = random_patch();
        const auto pn = random_patch();

        // margin chosen so the hinge is active and far from its kink
        double margin = 0.0;
        {
            std::vector<double> ea(D), ep(D), en(D);
            net.forward(pa.data(), ea.data(), ws_a);
            net.forward(pp.data(), ep.data(), ws_p);
            net.forward(pn.data(), en.data(), ws_n);
            margin = segbed::nn::squared_distance(ea.data(), en.data(), D) -
                     segbed::nn::squared_distance(ea.data(), ep.data(), D) +
                     50.0;
        }

        auto loss_at = [&]() {
            std::vector<double> ea(D), ep(D), en(D);
            net.forward(pa.data(), ea.data(), ws_a);
            net.forward(pp.data(), ep.data(), ws_p);
            net.forward(pn.data(), en.data(), ws_n);
            return segbed::nn::triplet_loss(ea.data(), ep.data(), en.data(),
                                            1, D, margin);
        };

        std::vector<double> grad(net.params().size(), 0.0);
        {
            std::vector<double> ea(D), ep(D), en(D), da(D), dp(D), dn(D);
            net.forward(pa.data(), ea.data(), ws_a);
            net.forward(pp.data(), ep.data(), ws_p);
            net.forward(pn.data(), en.data(), ws_n);
            segbed::nn::triplet_loss_grad(ea.data(), ep.data(), en.data(), D,
                                          margin, da.data(), dp.data(),
                                          dn.data());
            net.backward(pa.data(), da.data(), ws_a, grad.data());
            net.backward(pp.data(), dp.data(), ws_p, grad.data());
            net.backward(pn.data(), dn.data(), ws_n, grad.data());
        }

        const double h = 1e-6;
        for (std::size_t i = 0; i < net.params().size(); ++i) {
            const double saved = net.params()[i];
            net.params()[i] = saved + h;
            const double up = loss_at();
            net.params()[i] = saved - h;
            const double down = loss_at();
            net.params()[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            const double denom =
                std::max({std::abs(fd), std::abs(grad[i]), 1e-3});
            worst = std::max(worst, std::abs(fd - grad[i]) / denom);
        }
    }
    return worst;
}

} // namespace testutil
