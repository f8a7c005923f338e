#include "model.hpp"

#include "errors.hpp"
#include "thread_pool.hpp"

#include <json.hpp>

#include <array>
#include <cstring>
#include <fstream>

namespace segbed {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'S', 'E', 'G', 'B', 'E', 'D', 'M', '1'};

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        }
        table[i] = c;
    }
    return table;
}

json arch_to_json(const nn::ArchConfig& arch) {
    json convs = json::array();
    for (const auto& c : arch.convs) {
        convs.push_back({{"kernel_rows", c.kernel_rows},
                         {"kernel_cols", c.kernel_cols},
                         {"out_channels", c.out_channels},
                         {"pool", c.pool}});
    }
    return {{"input_rows", arch.input_rows},
            {"input_cols", arch.input_cols},
            {"convs", convs},
            {"dense_units", arch.dense_units},
            {"embedding_dim", arch.embedding_dim}};
}

nn::ArchConfig arch_from_json(const json& j) {
    nn::ArchConfig arch;
    arch.input_rows = j.at("input_rows").get<int>();
    arch.input_cols = j.at("input_cols").get<int>();
    arch.dense_units = j.at("dense_units").get<int>();
    arch.embedding_dim = j.at("embedding_dim").get<int>();
    arch.convs.clear();
    for (const auto& c : j.at("convs")) {
        arch.convs.push_back({c.at("kernel_rows").get<int>(),
                              c.at("kernel_cols").get<int>(),
                              c.at("out_channels").get<int>(),
                              c.at("pool").get<bool>()});
    }
    return arch;
}

} // namespace

std::uint32_t crc32(const void* data, std::size_t size) {
    static const auto table = make_crc_table();
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < size; ++i) {
        c = table[(c ^ p[i]) & 0xFFu] ^ (c >> 8);
    }
    return c ^ 0xFFFFFFFFu;
}

EmbeddingModel make_model(const nn::ArchConfig& arch, std::uint64_t seed) {
    EmbeddingModel model(arch);
    Rng rng(seed);
    model.init_he(rng);
    return model;
}

void save_model(const EmbeddingModel& model, const std::string& path) {
    json header;
    header["format_version"] = 1;
    header["arch"] = arch_to_json(model.arch());
    json layers = json::array();
    for (const auto& info : model.layout().params) {
        layers.push_back({{"name", info.name},
                          {"offset", info.offset},
                          {"count", info.count},
                          {"shape", info.shape}});
    }
    header["layers"] = layers;
    header["param_count"] = model.params().size();
    header["crc32"] = crc32(model.params().data(),
                            model.params().size() * sizeof(float));

    const std::string header_str = header.dump();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path);
    out.write(kMagic, sizeof(kMagic));
    const std::uint32_t len = static_cast<std::uint32_t>(header_str.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(header_str.data(), static_cast<std::streamsize>(len));
    out.write(reinterpret_cast<const char*>(model.params().data()),
              static_cast<std::streamsize>(model.params().size() *
                                           sizeof(float)));
    if (!out) raise(ErrorCode::io_failure, "short write to " + path);
}

EmbeddingModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io_failure, "cannot open " + path);

    char magic[8];
    std::uint32_t len = 0;
    in.read(magic, sizeof(magic));
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        raise(ErrorCode::unsupported_format, path + ": not a model checkpoint");
    }
    std::string header_str(len, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(len));
    if (!in) raise(ErrorCode::corrupt_manifest, path + ": truncated header");

    json header;
    try {
        header = json::parse(header_str);
    } catch (const json::exception& e) {
        raise(ErrorCode::corrupt_manifest, path + ": " + e.what());
    }

    nn::ArchConfig arch;
    std::size_t param_count = 0;
    std::uint32_t expected_crc = 0;
    try {
        arch = arch_from_json(header.at("arch"));
        param_count = header.at("param_count").get<std::size_t>();
        expected_crc = header.at("crc32").get<std::uint32_t>();
    } catch (const json::exception& e) {
        raise(ErrorCode::corrupt_manifest, path + ": " + e.what());
    }

    EmbeddingModel model(arch);
    if (model.params().size() != param_count) {
        raise(ErrorCode::arch_mismatch,
              path + ": header parameter count does not match architecture");
    }
    // header layer table must agree with the architecture-derived layout
    try {
        const auto& layers = header.at("layers");
        const auto& layout = model.layout().params;
        if (layers.size() != layout.size()) {
            raise(ErrorCode::arch_mismatch, path + ": layer table mismatch");
        }
        for (std::size_t i = 0; i < layout.size(); ++i) {
            if (layers[i].at("name").get<std::string>() != layout[i].name ||
                layers[i].at("offset").get<std::size_t>() != layout[i].offset ||
                layers[i].at("count").get<std::size_t>() != layout[i].count) {
                raise(ErrorCode::arch_mismatch,
                      path + ": layer table mismatch at " + layout[i].name);
            }
        }
    } catch (const json::exception& e) {
        raise(ErrorCode::corrupt_manifest, path + ": " + e.what());
    }

    in.read(reinterpret_cast<char*>(model.params().data()),
            static_cast<std::streamsize>(param_count * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != param_count * sizeof(float)) {
        raise(ErrorCode::checksum_mismatch, path + ": truncated weight blob");
    }
    const std::uint32_t actual =
        crc32(model.params().data(), param_count * sizeof(float));
    if (actual != expected_crc) {
        raise(ErrorCode::checksum_mismatch, path + ": weight CRC mismatch");
    }
    return model;
}

EmbeddingSequence embed_track(const EmbeddingModel& model,
                              const FeatureStore& store, int jobs) {
    const auto& arch = model.arch();
    if (arch.input_rows != store.config().rows() ||
        arch.input_cols != store.config().bins) {
        raise(ErrorCode::shape_mismatch,
              "store patch shape does not match the model input");
    }
    EmbeddingSequence seq;
    seq.track_id = store.track_id();
    seq.count = store.beat_count();
    seq.dim = static_cast<std::size_t>(arch.embedding_dim);
    seq.values.resize(seq.count * seq.dim);
    if (seq.count == 0) return seq;

    const std::size_t workers = std::min(resolve_jobs(jobs), seq.count);
    const std::size_t chunk = (seq.count + workers - 1) / workers;
    parallel_for(workers, workers, [&](std::size_t w) {
        nn::Workspace<float> ws = model.make_workspace();
        std::vector<float> patch(model.input_size());
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(seq.count, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            store.fill_patch(i, patch.data());
            model.forward(patch.data(), seq.values.data() + i * seq.dim, ws);
        }
    });
    return seq;
}

EmbeddingSequence raw_mean_embedding(const FeatureStore& store) {
    const int Q = store.config().rows();
    const int K = store.config().bins;
    EmbeddingSequence seq;
    seq.track_id = store.track_id();
    seq.count = store.beat_count();
    seq.dim = static_cast<std::size_t>(K);
    seq.values.resize(seq.count * seq.dim);

    std::vector<float> patch(static_cast<std::size_t>(Q) * K);
    for (std::size_t i = 0; i < seq.count; ++i) {
        store.fill_patch(i, patch.data());
        float* out = seq.values.data() + i * seq.dim;
        for (int k = 0; k < K; ++k) {
            double acc = 0.0;
            for (int q = 0; q < Q; ++q) {
                acc += patch[static_cast<std::size_t>(q) * K + k];
            }
            out[k] = static_cast<float>(acc / Q);
        }
    }
    return seq;
}

} // namespace segbed
