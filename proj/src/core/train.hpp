#pragma once

#include "model.hpp"
#include "nn.hpp"
#include "sampling.hpp"
#include "store.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace segbed {

enum class SamplerKind { unbiased, biased };

struct TrainConfig {
    double margin = 0.1;
    int epochs = 240;
    int batches_per_epoch = 256;
    int tracks_per_batch = 6;
    int triplets_per_track = 16;
    double learning_rate = 1e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    bool patch_max_norm = false;
    SamplingParams sampling;
    std::uint64_t seed = 0;
    int jobs = 0;

    int batch_size() const { return tracks_per_batch * triplets_per_track; }
    void validate() const;
};

struct AdamState {
    std::vector<float> m;
    std::vector<float> v;
    long step = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0f), v(n, 0.0f) {}
};

// One mini-batch of patches, component-major.
struct TripletBatch {
    int count = 0;
    std::size_t patch_size = 0;
    std::vector<float> anchors;   // count x patch_size
    std::vector<float> positives;
    std::vector<float> negatives;
};

// Backprop through the batch and one Adam update. Returns the pre-update
// batch loss (the sum over triplets). Raises non_finite_loss when the loss
// leaves the reals.
double grad_step(EmbeddingModel& model, const TripletBatch& batch,
                 const TrainConfig& cfg, AdamState& state);

// Gradient accumulation only (no update); exposed for the gradient checks.
// Returns the batch losssum and adds parameter gradients into grad.
double batch_gradients(const EmbeddingModel& model, const TripletBatch& batch,
                       double margin, float* grad, int jobs);

struct TrainResult {
    EmbeddingModel model;
    std::vector<double> epoch_mean_loss;
};

// Full training run over a dataset of feature stores. Per batch: choose
// tracks_per_batch tracks, draw triplets_per_track triplets from each via
// the selected sampler, fetch patches, grad_step. Deterministic per seed.
// loss_csv (epoch,mean_loss,wall_sec) and triplet_log
// (epoch,batch,track_id,anchor,positive,negative) are optional paths.
TrainResult train(const std::vector<FeatureStore>& stores, SamplerKind sampler,
                  const TrainConfig& cfg, const nn::ArchConfig& arch,
                  const std::string& loss_csv = "",
                  const std::string& triplet_log = "",
                  const std::function<void(const std::string&)>& info = {});

} // namespace segbed
