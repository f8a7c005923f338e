#pragma once

#include "errors.hpp"
#include "gemm.hpp"
#include "rng.hpp"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace segbed::nn {

// Valid convolution, stride 1, ReLU, optionally followed by 2x2 max pool.
struct ConvLayerSpec {
    int kernel_rows = 6; // time axis
    int kernel_cols = 4; // frequency axis
    int out_channels = 16;
    bool pool = true;

    bool operator==(const ConvLayerSpec&) const = default;
};

struct ArchConfig {
    int input_rows = 128; // patch time rows (Q)
    int input_cols = 72;  // frequency bins (K)
    std::vector<ConvLayerSpec> convs = {{6, 4, 16, true},
                                        {6, 4, 32, true},
                                        {6, 4, 64, true},
                                        {6, 4, 64, true}};
    int dense_units = 128;
    int embedding_dim = 128;

    bool operator==(const ArchConfig&) const = default;
};

struct ConvDims {
    int in_h = 0, in_w = 0, in_c = 0;
    int out_h = 0, out_w = 0, out_c = 0;    // post conv
    int pool_h = 0, pool_w = 0;             // post pool (== out when no pool)

    std::size_t out_cells() const {
        return static_cast<std::size_t>(out_h) * out_w;
    }
    std::size_t patch_len() const { return patch_len_; }
    std::size_t patch_len_ = 0; // kernel_rows * kernel_cols * in_c
};

struct ParamInfo {
    std::string name;
    std::size_t offset = 0;
    std::size_t count = 0;
    std::vector<int> shape;
};

// Shapes and the flat parameter layout derived from an architecture.
struct Layout {
    std::vector<ConvDims> conv;
    std::size_t flat_size = 0; // dense input size
    std::vector<ParamInfo> params;
    std::size_t total = 0;

    static Layout from(const ArchConfig& arch);
};

inline Layout Layout::from(const ArchConfig& arch) {
    if (arch.input_rows < 1 || arch.input_cols < 1 || arch.convs.empty() ||
        arch.dense_units < 1 || arch.embedding_dim < 1) {
        raise(ErrorCode::invalid_argument, "bad architecture");
    }
    Layout layout;
    int h = arch.input_rows, w = arch.input_cols, c = 1;
    for (const auto& spec : arch.convs) {
        ConvDims d;
        d.in_h = h;
        d.in_w = w;
        d.in_c = c;
        d.out_h = h - spec.kernel_rows + 1;
        d.out_w = w - spec.kernel_cols + 1;
        d.out_c = spec.out_channels;
        d.patch_len_ = static_cast<std::size_t>(spec.kernel_rows) *
                       spec.kernel_cols * c;
        if (d.out_h < 1 || d.out_w < 1 || spec.out_channels < 1) {
            raise(ErrorCode::shape_mismatch,
                  "conv kernel does not fit its input");
        }
        if (spec.pool) {
            d.pool_h = d.out_h / 2;
            d.pool_w = d.out_w / 2;
            if (d.pool_h < 1 || d.pool_w < 1) {
                raise(ErrorCode::shape_mismatch, "pool output is empty");
            }
        } else {
            d.pool_h = d.out_h;
            d.pool_w = d.out_w;
        }
        layout.conv.push_back(d);
        h = d.pool_h;
        w = d.pool_w;
        c = d.out_c;
    }
    layout.flat_size = static_cast<std::size_t>(h) * w * c;

    std::size_t offset = 0;
    auto add = [&](const std::string& name, std::vector<int> shape) {
        std::size_t count = 1;
        for (int s : shape) count *= static_cast<std::size_t>(s);
        layout.params.push_back({name, offset, count, std::move(shape)});
        offset += count;
    };
    for (std::size_t i = 0; i < arch.convs.size(); ++i) {
        const auto& spec = arch.convs[i];
        add("conv" + std::to_string(i) + ".w",
            {spec.kernel_rows, spec.kernel_cols, layout.conv[i].in_c,
             spec.out_channels});
        add("conv" + std::to_string(i) + ".b", {spec.out_channels});
    }
    add("dense.w", {static_cast<int>(layout.flat_size), arch.dense_units});
    add("dense.b", {arch.dense_units});
    add("out.w", {arch.dense_units, arch.embedding_dim});
    add("out.b", {arch.embedding_dim});
    layout.total = offset;
    return layout;
}

// Per-patch scratch: forward activations (kept for the backward pass) and
// gradient buffers. One workspace serves one patch at a time.
template <typename T>
struct Workspace {
    std::vector<std::vector<T>> col;      // im2col rows per conv layer
    std::vector<std::vector<T>> conv_out; // post-ReLU, pre-pool
    std::vector<std::vector<T>> pooled;   // post pool (HWC)
    std::vector<std::vector<int>> pool_arg;
    std::vector<T> dense_out;             // post-ReLU hidden
    std::vector<T> grad_a, grad_b, grad_col;
    std::vector<T> weight_t;              // transposed conv weights scratch
};

template <typename T>
class Network {
public:
    Network() = default;
    explicit Network(const ArchConfig& arch)
        : arch_(arch), layout_(Layout::from(arch)) {
        params_.assign(layout_.total, T(0));
    }

    const ArchConfig& arch() const { return arch_; }
    const Layout& layout() const { return layout_; }
    std::vector<T>& params() { return params_; }
    const std::vector<T>& params() const { return params_; }

    std::size_t input_size() const {
        return static_cast<std::size_t>(arch_.input_rows) * arch_.input_cols;
    }

    // He-uniform weights for the ReLU stack, zero biases. The output layer is
    // linear but shares the same scheme.
    void init_he(Rng& rng) {
        for (const auto& info : layout_.params) {
            T* p = params_.data() + info.offset;
            if (info.name.ends_with(".b")) {
                std::memset(p, 0, info.count * sizeof(T));
                continue;
            }
            std::size_t fan_in = 1;
            for (std::size_t i = 0; i + 1 < info.shape.size(); ++i) {
                fan_in *= static_cast<std::size_t>(info.shape[i]);
            }
            const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
            for (std::size_t i = 0; i < info.count; ++i) {
                p[i] = static_cast<T>(rng.next_double(-bound, bound));
            }
        }
    }

    Workspace<T> make_workspace() const {
        Workspace<T> ws;
        std::size_t max_act = input_size();
        std::size_t max_col = 1;
        for (std::size_t i = 0; i < layout_.conv.size(); ++i) {
            const ConvDims& d = layout_.conv[i];
            ws.col.emplace_back(d.out_cells() * d.patch_len());
            ws.conv_out.emplace_back(d.out_cells() *
                                     static_cast<std::size_t>(d.out_c));
            ws.pooled.emplace_back(static_cast<std::size_t>(d.pool_h) *
                                   d.pool_w * d.out_c);
            ws.pool_arg.emplace_back(ws.pooled.back().size());
            max_act = std::max(max_act, ws.conv_out.back().size());
            max_col = std::max(max_col, ws.col.back().size());
        }
        ws.dense_out.resize(static_cast<std::size_t>(arch_.dense_units));
        ws.grad_a.resize(max_act);
        ws.grad_b.resize(max_act);
        ws.grad_col.resize(max_col);
        std::size_t max_w = 1;
        for (std::size_t i = 0; i < layout_.conv.size(); ++i) {
            max_w = std::max(max_w, layout_.conv[i].patch_len() *
                                        static_cast<std::size_t>(
                                            layout_.conv[i].out_c));
        }
        ws.weight_t.resize(max_w);
        return ws;
    }

    // input: input_rows x input_cols (time-major), embedding: embedding_dim.
    void forward(const T* input, T* embedding, Workspace<T>& ws) const {
        const T* x = input;
        for (std::size_t li = 0; li < layout_.conv.size(); ++li) {
            const ConvDims& d = layout_.conv[li];
            const ConvLayerSpec& spec = arch_.convs[li];
            im2col(x, d, spec, ws.col[li].data());
            const T* w = param("conv" + std::to_string(li) + ".w");
            const T* b = param("conv" + std::to_string(li) + ".b");
            matmul_bias(ws.col[li].data(), w, b, ws.conv_out[li].data(),
                        d.out_cells(), d.patch_len(),
                        static_cast<std::size_t>(d.out_c));
            for (T& v : ws.conv_out[li]) {
                if (v < T(0)) v = T(0);
            }
            if (spec.pool) {
                max_pool(ws.conv_out[li].data(), d, ws.pooled[li].data(),
                         ws.pool_arg[li].data());
                x = ws.pooled[li].data();
            } else {
                ws.pooled[li] = ws.conv_out[li];
                x = ws.pooled[li].data();
            }
        }

        const T* dw = param("dense.w");
        const T* db = param("dense.b");
        matmul_bias(x, dw, db, ws.dense_out.data(), 1, layout_.flat_size,
                    static_cast<std::size_t>(arch_.dense_units));
        for (T& v : ws.dense_out) {
            if (v < T(0)) v = T(0);
        }
        const T* ow = param("out.w");
        const T* ob = param("out.b");
        matmul_bias(ws.dense_out.data(), ow, ob, embedding, 1,
                    static_cast<std::size_t>(arch_.dense_units),
                    static_cast<std::size_t>(arch_.embedding_dim));
    }

    // Accumulates parameter gradients into grad (same layout as params).
    // ws must hold the activations of forward(input, ..., ws).
    void backward(const T* input, const T* grad_embedding, Workspace<T>& ws,
                  T* grad) const {
        const std::size_t D = static_cast<std::size_t>(arch_.embedding_dim);
        const std::size_t U = static_cast<std::size_t>(arch_.dense_units);

        // output layer
        accumulate_at_b(ws.dense_out.data(), grad_embedding,
                        grad + offset("out.w"), 1, U, D);
        {
            T* gb = grad + offset("out.b");
            for (std::size_t d = 0; d < D; ++d) gb[d] += grad_embedding[d];
        }
        T* dh = ws.grad_a.data(); // dense hidden gradient
        matmul_bt(grad_embedding, param("out.w"), dh, 1, U, D);
        for (std::size_t u = 0; u < U; ++u) {
            if (ws.dense_out[u] <= T(0)) dh[u] = T(0);
        }

        // dense layer
        const T* flat_in = layout_.conv.empty()
                               ? input
                               : ws.pooled.back().data();
        accumulate_at_b(flat_in, dh, grad + offset("dense.w"), 1,
                        layout_.flat_size, U);
        {
            T* gb = grad + offset("dense.b");
            for (std::size_t u = 0; u < U; ++u) gb[u] += dh[u];
        }
        // incoming: gradient at the current layer's pooled output;
        // scratch: free buffer for the routed conv-cell gradient.
        T* incoming = ws.grad_b.data();
        T* scratch = ws.grad_a.data();
        matmul_bt(dh, param("dense.w"), incoming, 1, layout_.flat_size, U);

        for (std::size_t li = layout_.conv.size(); li-- > 0;) {
            const ConvDims& d = layout_.conv[li];
            const ConvLayerSpec& spec = arch_.convs[li];
            const std::size_t cells = d.out_cells();
            const std::size_t oc = static_cast<std::size_t>(d.out_c);

            // route pooled gradient back to conv cells
            T* dconv = scratch;
            if (spec.pool) {
                std::memset(dconv, 0, cells * oc * sizeof(T));
                const std::size_t n_pooled = ws.pooled[li].size();
                for (std::size_t i = 0; i < n_pooled; ++i) {
                    dconv[ws.pool_arg[li][i]] += incoming[i];
                }
            } else {
                std::memcpy(dconv, incoming, cells * oc * sizeof(T));
            }
            // ReLU mask
            for (std::size_t i = 0; i < cells * oc; ++i) {
                if (ws.conv_out[li][i] <= T(0)) dconv[i] = T(0);
            }

            const std::string id = std::to_string(li);
            accumulate_at_b(ws.col[li].data(), dconv,
                            grad + offset("conv" + id + ".w"), cells,
                            d.patch_len(), oc);
            {
                T* gb = grad + offset("conv" + id + ".b");
                for (std::size_t m = 0; m < cells; ++m) {
                    const T* g = dconv + m * oc;
                    for (std::size_t c = 0; c < oc; ++c) gb[c] += g[c];
                }
            }
            if (li == 0) break; // input gradient not needed
            {
                const T* w = param("conv" + id + ".w");
                const std::size_t kd_len = d.patch_len();
                for (std::size_t kd = 0; kd < kd_len; ++kd) {
                    for (std::size_t c = 0; c < oc; ++c) {
                        ws.weight_t[c * kd_len + kd] = w[kd * oc + c];
                    }
                }
            }
            matmul_bt_pre(dconv, ws.weight_t.data(), ws.grad_col.data(),
                          cells, d.patch_len(), oc);
            std::memset(incoming, 0,
                        static_cast<std::size_t>(d.in_h) * d.in_w * d.in_c *
                            sizeof(T));
            col2im_add(ws.grad_col.data(), d, spec, incoming);
            // incoming now holds the next (lower) layer's pooled-output
            // gradient; dconv's buffer becomes the next scratch.
        }
    }

    const T* param(const std::string& name) const {
        return params_.data() + offset(name);
    }

    std::size_t offset(const std::string& name) const {
        for (const auto& info : layout_.params) {
            if (info.name == name) return info.offset;
        }
        raise(ErrorCode::internal, "unknown parameter " + name);
    }

private:
    void im2col(const T* x, const ConvDims& d, const ConvLayerSpec& spec,
                T* out) const {
        const std::size_t row_stride =
            static_cast<std::size_t>(d.in_w) * d.in_c;
        const std::size_t run = static_cast<std::size_t>(spec.kernel_cols) *
                                d.in_c;
        for (int y = 0; y < d.out_h; ++y) {
            for (int xo = 0; xo < d.out_w; ++xo) {
                T* dst = out + (static_cast<std::size_t>(y) * d.out_w + xo) *
                                   d.patch_len();
                const T* src = x + static_cast<std::size_t>(y) * row_stride +
                               static_cast<std::size_t>(xo) * d.in_c;
                for (int dy = 0; dy < spec.kernel_rows; ++dy) {
                    std::memcpy(dst, src, run * sizeof(T));
                    dst += run;
                    src += row_stride;
                }
            }
        }
    }

    void col2im_add(const T* cols, const ConvDims& d,
                    const ConvLayerSpec& spec, T* x) const {
        const std::size_t row_stride =
            static_cast<std::size_t>(d.in_w) * d.in_c;
        const std::size_t run = static_cast<std::size_t>(spec.kernel_cols) *
                                d.in_c;
        for (int y = 0; y < d.out_h; ++y) {
            for (int xo = 0; xo < d.out_w; ++xo) {
                const T* src = cols +
                               (static_cast<std::size_t>(y) * d.out_w + xo) *
                                   d.patch_len();
                T* dst = x + static_cast<std::size_t>(y) * row_stride +
                         static_cast<std::size_t>(xo) * d.in_c;
                for (int dy = 0; dy < spec.kernel_rows; ++dy) {
                    for (std::size_t i = 0; i < run; ++i) dst[i] += src[i];
                    src += run;
                    dst += row_stride;
                }
            }
        }
    }

    void max_pool(const T* in, const ConvDims& d, T* out, int* argmax) const {
        const std::size_t oc = static_cast<std::size_t>(d.out_c);
        const std::size_t row = static_cast<std::size_t>(d.out_w) * oc;
        for (int y = 0; y < d.pool_h; ++y) {
            for (int x = 0; x < d.pool_w; ++x) {
                const std::size_t base =
                    static_cast<std::size_t>(2 * y) * row +
                    static_cast<std::size_t>(2 * x) * oc;
                T* o = out + (static_cast<std::size_t>(y) * d.pool_w + x) * oc;
                int* a = argmax +
                         (static_cast<std::size_t>(y) * d.pool_w + x) * oc;
                for (std::size_t c = 0; c < oc; ++c) {
                    std::size_t best = base + c;
                    T best_v = in[best];
                    const std::size_t candidates[3] = {base + oc + c,
                                                       base + row + c,
                                                       base + row + oc + c};
                    for (std::size_t cand : candidates) {
                        if (in[cand] > best_v) {
                            best_v = in[cand];
                            best = cand;
                        }
                    }
                    o[c] = best_v;
                    a[c] = static_cast<int>(best);
                }
            }
        }
    }

    ArchConfig arch_;
    Layout layout_;
    std::vector<T> params_;
};

} // namespace segbed::nn
