#include "train.hpp"

#include "errors.hpp"
#include "loss.hpp"
#include "thread_pool.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

namespace segbed {

namespace {

// Gradients are accumulated per fixed chunk and reduced in chunk order, so
// results do not depend on how many threads execute the chunks.
constexpr int kGradChunks = 8;

void max_normalize(float* patch, std::size_t n) {
    float peak = 0.0f;
    for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, std::abs(patch[i]));
    if (peak > 0.0f) {
        const float inv = 1.0f / peak;
        for (std::size_t i = 0; i < n; ++i) patch[i] *= inv;
    }
}

struct ChunkScratch {
    nn::Workspace<float> ws_a, ws_p, ws_n;
    std::vector<float> emb_a, emb_p, emb_n;
    std::vector<float> d_a, d_p, d_n;
    std::vector<float> grad;
    double loss = 0.0;
};

} // namespace

void TrainConfig::validate() const {
    if (margin <= 0.0) raise(ErrorCode::invalid_argument, "margin must be > 0");
    if (epochs < 1 || batches_per_epoch < 1 || tracks_per_batch < 1 ||
        triplets_per_track < 1) {
        raise(ErrorCode::invalid_argument, "bad training schedule");
    }
    if (learning_rate <= 0.0) {
        raise(ErrorCode::invalid_argument, "learning rate must be > 0");
    }
    sampling.validate();
}

double batch_gradients(const EmbeddingModel& model, const TripletBatch& batch,
                       double margin, float* grad, int jobs) {
    const std::size_t dim = static_cast<std::size_t>(model.arch().embedding_dim);
    const std::size_t n_params = model.params().size();
    if (batch.patch_size != model.input_size()) {
        raise(ErrorCode::shape_mismatch, "batch patch size mismatch");
    }

    const int chunks = std::min(kGradChunks, batch.count);
    std::vector<ChunkScratch> scratch(static_cast<std::size_t>(chunks));
    for (auto& s : scratch) {
        s.ws_a = model.make_workspace();
        s.ws_p = model.make_workspace();
        s.ws_n = model.make_workspace();
        s.emb_a.resize(dim);
        s.emb_p.resize(dim);
        s.emb_n.resize(dim);
        s.d_a.resize(dim);
        s.d_p.resize(dim);
        s.d_n.resize(dim);
        s.grad.assign(n_params, 0.0f);
    }

    const int per_chunk = (batch.count + chunks - 1) / chunks;
    parallel_for(static_cast<std::size_t>(chunks), resolve_jobs(jobs),
                 [&](std::size_t ci) {
        ChunkScratch& s = scratch[ci];
        const int lo = static_cast<int>(ci) * per_chunk;
        const int hi = std::min(batch.count, lo + per_chunk);
        for (int c = lo; c < hi; ++c) {
            const float* pa =
                batch.anchors.data() + static_cast<std::size_t>(c) * batch.patch_size;
            const float* pp =
                batch.positives.data() + static_cast<std::size_t>(c) * batch.patch_size;
            const float* pn =
                batch.negatives.data() + static_cast<std::size_t>(c) * batch.patch_size;
            model.forward(pa, s.emb_a.data(), s.ws_a);
            model.forward(pp, s.emb_p.data(), s.ws_p);
            model.forward(pn, s.emb_n.data(), s.ws_n);
            const double l = nn::triplet_loss_grad(
                s.emb_a.data(), s.emb_p.data(), s.emb_n.data(), dim, margin,
                s.d_a.data(), s.d_p.data(), s.d_n.data());
            s.loss += l;
            if (l > 0.0) {
                model.backward(pa, s.d_a.data(), s.ws_a, s.grad.data());
                model.backward(pp, s.d_p.data(), s.ws_p, s.grad.data());
                model.backward(pn, s.d_n.data(), s.ws_n, s.grad.data());
            }
        }
    });

    double total = 0.0;
    for (const auto& s : scratch) {
        total += s.loss;
        const float* g = s.grad.data();
        for (std::size_t i = 0; i < n_params; ++i) grad[i] += g[i];
    }
    return total;
}

double grad_step(EmbeddingModel& model, const TripletBatch& batch,
                 const TrainConfig& cfg, AdamState& state) {
    const std::size_t n = model.params().size();
    if (state.m.size() != n) {
        raise(ErrorCode::invalid_argument, "optimizer state size mismatch");
    }
    std::vector<float> grad(n, 0.0f);
    const double loss =
        batch_gradients(model, batch, cfg.margin, grad.data(), cfg.jobs);
    if (!std::isfinite(loss)) {
        raise(ErrorCode::non_finite_loss,
              "non-finite triplet loss at optimizer step " +
                  std::to_string(state.step + 1));
    }

    state.step += 1;
    const double b1 = cfg.adam_beta1;
    const double b2 = cfg.adam_beta2;
    const double correction1 = 1.0 - std::pow(b1, state.step);
    const double correction2 = 1.0 - std::pow(b2, state.step);
    float* p = model.params().data();
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        const double m = b1 * state.m[i] + (1.0 - b1) * g;
        const double v = b2 * state.v[i] + (1.0 - b2) * g * g;
        state.m[i] = static_cast<float>(m);
        state.v[i] = static_cast<float>(v);
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        p[i] -= static_cast<float>(cfg.learning_rate * m_hat /
                                   (std::sqrt(v_hat) + cfg.adam_epsilon));
    }
    return loss;
}

TrainResult train(const std::vector<FeatureStore>& stores, SamplerKind sampler,
                  const TrainConfig& cfg, const nn::ArchConfig& arch,
                  const std::string& loss_csv, const std::string& triplet_log,
                  const std::function<void(const std::string&)>& info) {
    cfg.validate();
    if (stores.empty()) {
        raise(ErrorCode::empty_dataset, "no feature stores to train on");
    }
    for (const auto& s : stores) {
        const long min_beats = 2L * cfg.sampling.delta_n_min + 1;
        if (static_cast<long>(s.beat_count()) < min_beats) {
            raise(ErrorCode::empty_negative_region,
                  "track " + s.track_id() + " is too short to sample");
        }
    }

    const std::size_t n_tracks = stores.size();
    const bool with_replacement =
        n_tracks < static_cast<std::size_t>(cfg.tracks_per_batch);
    if (with_replacement && info) {
        info("dataset has fewer than " + std::to_string(cfg.tracks_per_batch) +
             " tracks; drawing tracks with replacement");
    }

    std::ofstream loss_out;
    if (!loss_csv.empty()) {
        loss_out.open(loss_csv, std::ios::trunc);
        if (!loss_out) raise(ErrorCode::io_failure, "cannot write " + loss_csv);
        loss_out << "epoch,mean_loss,wall_sec\n";
    }
    std::ofstream trip_out;
    if (!triplet_log.empty()) {
        trip_out.open(triplet_log, std::ios::trunc);
        if (!trip_out) {
            raise(ErrorCode::io_failure, "cannot write " + triplet_log);
        }
        trip_out << "epoch,batch,track_id,anchor,positive,negative\n";
    }

    TrainResult result{make_model(arch, cfg.seed), {}};
    AdamState state(result.model.params().size());
    Rng rng(cfg.seed ^ 0xA5A5A5A5A5A5A5A5ull);

    const int C = cfg.batch_size();
    TripletBatch batch;
    batch.count = C;
    batch.patch_size = result.model.input_size();
    batch.anchors.resize(static_cast<std::size_t>(C) * batch.patch_size);
    batch.positives.resize(static_cast<std::size_t>(C) * batch.patch_size);
    batch.negatives.resize(static_cast<std::size_t>(C) * batch.patch_size);

    std::vector<std::size_t> track_order(n_tracks);
    std::iota(track_order.begin(), track_order.end(), 0);
    std::vector<std::size_t> chosen(static_cast<std::size_t>(cfg.tracks_per_batch));
    std::vector<TripletIndices> triplets(static_cast<std::size_t>(C));
    std::vector<std::size_t> triplet_store(static_cast<std::size_t>(C));

    const auto t0 = std::chrono::steady_clock::now();
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (int b = 0; b < cfg.batches_per_epoch; ++b) {
            // choose tracks
            if (with_replacement) {
                for (auto& c : chosen) c = rng.next_below(n_tracks);
            } else {
                for (int j = 0; j < cfg.tracks_per_batch; ++j) {
                    const std::size_t pick =
                        j + rng.next_below(n_tracks - static_cast<std::size_t>(j));
                    std::swap(track_order[j], track_order[pick]);
                    chosen[static_cast<std::size_t>(j)] = track_order[j];
                }
            }
            // draw triplets
            int c = 0;
            for (std::size_t ti : chosen) {
                const FeatureStore& store = stores[ti];
                const long total = static_cast<long>(store.beat_count());
                for (int k = 0; k < cfg.triplets_per_track; ++k, ++c) {
                    triplets[c] = sampler == SamplerKind::biased
                                      ? sample_triplet_biased(store,
                                                              cfg.sampling, rng)
                                      : sample_triplet(total, cfg.sampling, rng);
                    triplet_store[c] = ti;
                    if (trip_out) {
                        trip_out << epoch << ',' << b << ','
                                 << store.track_id() << ',' << triplets[c].anchor
                                 << ',' << triplets[c].positive << ','
                                 << triplets[c].negative << '\n';
                    }
                }
            }
            // fetch patches (slot-parallel, deterministic content)
            parallel_for(static_cast<std::size_t>(C), resolve_jobs(cfg.jobs),
                         [&](std::size_t i) {
                const FeatureStore& store = stores[triplet_store[i]];
                const std::size_t off = i * batch.patch_size;
                store.fill_patch(triplets[i].anchor, batch.anchors.data() + off);
                store.fill_patch(triplets[i].positive,
                                 batch.positives.data() + off);
                store.fill_patch(triplets[i].negative,
                                 batch.negatives.data() + off);
                if (cfg.patch_max_norm) {
                    max_normalize(batch.anchors.data() + off, batch.patch_size);
                    max_normalize(batch.positives.data() + off, batch.patch_size);
                    max_normalize(batch.negatives.data() + off, batch.patch_size);
                }
            });

            epoch_loss += grad_step(result.model, batch, cfg, state);
        }
        const double mean_loss = epoch_loss / cfg.batches_per_epoch;
        result.epoch_mean_loss.push_back(mean_loss);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        if (loss_out) {
            loss_out << epoch << ',' << mean_loss << ',' << wall << '\n';
            loss_out.flush();
        }
        if (info) {
            info("epoch " + std::to_string(epoch) + "/" +
                 std::to_string(cfg.epochs) + " mean loss " +
                 std::to_string(mean_loss));
        }
    }
    return result;
}

} // namespace segbed
