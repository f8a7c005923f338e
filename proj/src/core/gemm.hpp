#pragma once

#include <cstddef>

namespace segbed::nn {

// Row-major matrix products sized for the conv layers here (N is a channel
// count, K a receptive-field size). Written so the n-loops vectorize; the
// 4-row blocking keeps B rows hot across rows of A.

// C[M x N] = A[M x K] * B[K x N] + bias[N] (bias may be null).
template <typename T>
void matmul_bias(const T* A, const T* B, const T* bias, T* C, std::size_t M,
                 std::size_t K, std::size_t N) {
    std::size_t m = 0;
    for (; m + 4 <= M; m += 4) {
        const T* a0 = A + (m + 0) * K;
        const T* a1 = A + (m + 1) * K;
        const T* a2 = A + (m + 2) * K;
        const T* a3 = A + (m + 3) * K;
        T* c0 = C + (m + 0) * N;
        T* c1 = C + (m + 1) * N;
        T* c2 = C + (m + 2) * N;
        T* c3 = C + (m + 3) * N;
        for (std::size_t n = 0; n < N; ++n) {
            const T b = bias ? bias[n] : T(0);
            c0[n] = b;
            c1[n] = b;
            c2[n] = b;
            c3[n] = b;
        }
        for (std::size_t k = 0; k < K; ++k) {
            const T* brow = B + k * N;
            const T v0 = a0[k], v1 = a1[k], v2 = a2[k], v3 = a3[k];
            for (std::size_t n = 0; n < N; ++n) {
                const T b = brow[n];
                c0[n] += v0 * b;
                c1[n] += v1 * b;
                c2[n] += v2 * b;
                c3[n] += v3 * b;
            }
        }
    }
    for (; m < M; ++m) {
        const T* a = A + m * K;
        T* c = C + m * N;
        for (std::size_t n = 0; n < N; ++n) c[n] = bias ? bias[n] : T(0);
        for (std::size_t k = 0; k < K; ++k) {
            const T v = a[k];
            const T* brow = B + k * N;
            for (std::size_t n = 0; n < N; ++n) c[n] += v * brow[n];
        }
    }
}

// C[K x N] += A^T * G for A[M x K], G[M x N]: the weight-gradient product,
// accumulated as rank-1 updates so A and G stream row by row.
template <typename T>
void accumulate_at_b(const T* A, const T* G, T* C, std::size_t M,
                     std::size_t K, std::size_t N) {
    for (std::size_t m = 0; m < M; ++m) {
        const T* a = A + m * K;
        const T* g = G + m * N;
        for (std::size_t k = 0; k < K; ++k) {
            const T v = a[k];
            if (v == T(0)) continue;
            T* c = C + k * N;
            for (std::size_t n = 0; n < N; ++n) c[n] += v * g[n];
        }
    }
}

// C[M x K] = G * B^T for G[M x N], B[K x N]: the input-gradient product;
// each output is a short dot over the channel axis.
template <typename T>
void matmul_bt(const T* G, const T* B, T* C, std::size_t M, std::size_t K,
               std::size_t N) {
    for (std::size_t m = 0; m < M; ++m) {
        const T* g = G + m * N;
        T* c = C + m * K;
        for (std::size_t k = 0; k < K; ++k) {
            const T* b = B + k * N;
            T acc = T(0);
            for (std::size_t n = 0; n < N; ++n) acc += g[n] * b[n];
            c[k] = acc;
        }
    }
}

// Same product expressed with a pre-transposed B (BT is [N x K]), built from
// rank-1 updates so the k-loops vectorize; rows of G that the ReLU mask
// zeroed are skipped outright.
template <typename T>
void matmul_bt_pre(const T* G, const T* BT, T* C, std::size_t M,
                   std::size_t K, std::size_t N) {
    for (std::size_t m = 0; m < M; ++m) {
        const T* g = G + m * N;
        T* c = C + m * K;
        for (std::size_t k = 0; k < K; ++k) c[k] = T(0);
        for (std::size_t n = 0; n < N; ++n) {
            const T v = g[n];
            if (v == T(0)) continue;
            const T* b = BT + n * K;
            for (std::size_t k = 0; k < K; ++k) c[k] += v * b[k];
        }
    }
}

} // namespace segbed::nn
