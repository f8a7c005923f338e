#pragma once

#include <cstddef>

namespace segbed::nn {

// Batch triplet loss: sum over triplets of
//   [ ||a-p||^2 - ||a-n||^2 + margin ]_+
// with squared Euclidean distances and a hinge at zero. The gradient flows
// only through triplets whose hinge argument is strictly positive.

template <typename T>
double squared_distance(const T* x, const T* y, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double d = static_cast<double>(x[i]) - static_cast<double>(y[i]);
        acc += d * d;
    }
    return acc;
}

template <typename T>
double triplet_loss(const T* anchors, const T* positives, const T* negatives,
                    std::size_t count, std::size_t dim, double margin) {
    double total = 0.0;
    for (std::size_t c = 0; c < count; ++c) {
        const T* a = anchors + c * dim;
        const T* p = positives + c * dim;
        const T* n = negatives + c * dim;
        const double h =
            squared_distance(a, p, dim) - squared_distance(a, n, dim) + margin;
        if (h > 0.0) total += h;
    }
    return total;
}

// Per-triplet loss and embedding gradients. Gradients are zeroed when the
// hinge is inactive.
template <typename T>
double triplet_loss_grad(const T* a, const T* p, const T* n, std::size_t dim,
                         double margin, T* da, T* dp, T* dn) {
    const double h =
        squared_distance(a, p, dim) - squared_distance(a, n, dim) + margin;
    if (h <= 0.0) {
        for (std::size_t i = 0; i < dim; ++i) da[i] = dp[i] = dn[i] = T(0);
        return 0.0;
    }
    for (std::size_t i = 0; i < dim; ++i) {
        da[i] = T(2) * (n[i] - p[i]);
        dp[i] = T(2) * (p[i] - a[i]);
        dn[i] = T(2) * (a[i] - n[i]);
    }
    return h;
}

} // namespace segbed::nn
