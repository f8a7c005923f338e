#pragma once

#include "cqt.hpp"
#include "nn.hpp"
#include "segmentation.hpp"
#include "store.hpp"
#include "train.hpp"

#include <string>
#include <vector>

namespace segbed {

// Flat key=value configuration covering every stage of the pipeline.
// Unknown keys are rejected; values are validated by the owning module when
// the typed parameter structs are materialized.
class PipelineConfig {
public:
    PipelineConfig(); // defaults

    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;
    std::vector<std::string> keys() const;

    // `key = value` lines, '#' comments; later assignments win.
    void load_file(const std::string& path);
    void load_text(const std::string& text, const std::string& origin = "");
    std::string dump() const;

    int sample_rate() const;
    CqtParams cqt() const;
    PatchConfig patch() const;
    SamplingParams sampling() const;
    nn::ArchConfig arch() const;
    TrainConfig train(std::uint64_t seed, int jobs) const;
    SegmentationParams segmentation() const;
    double eval_window_sec() const;

private:
    struct Entry {
        std::string key;
        std::string value;
    };
    const Entry* find(const std::string& key) const;
    Entry* find(const std::string& key);

    std::vector<Entry> entries_; // fixed key order for dumps
};

} // namespace segbed
