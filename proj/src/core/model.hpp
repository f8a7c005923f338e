#pragma once

#include "nn.hpp"
#include "store.hpp"

#include <string>
#include <vector>

namespace segbed {

using EmbeddingModel = nn::Network<float>;

// Seeded He-uniform initialization.
EmbeddingModel make_model(const nn::ArchConfig& arch, std::uint64_t seed);

// Checkpoint: magic, JSON header (architecture, per-layer offsets, CRC32 of
// the weight blob), then the raw little-endian float32 weights. Round trips
// are bit-exact.
void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path);

struct EmbeddingSequence {
    std::string track_id;
    std::size_t count = 0;
    std::size_t dim = 0;
    std::vector<float> values; // count x dim

    const float* row(std::size_t i) const { return values.data() + i * dim; }
};

// Forward pass at every beat of the store.
EmbeddingSequence embed_track(const EmbeddingModel& model,
                              const FeatureStore& store, int jobs = 0);

// Unembedded baseline: each beat's patch mean-pooled over time into a
// bins-dimensional vector. Feeds the same boundary detector for comparison.
EmbeddingSequence raw_mean_embedding(const FeatureStore& store);

std::uint32_t crc32(const void* data, std::size_t size);

} // namespace segbed
