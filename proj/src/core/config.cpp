#include "config.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace segbed {

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        raise(ErrorCode::invalid_argument,
              key + ": expected an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        raise(ErrorCode::invalid_argument,
              key + ": expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    raise(ErrorCode::invalid_argument,
          key + ": expected a boolean, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(static_cast<int>(parse_int(key, strip(item))));
    }
    if (out.empty()) {
        raise(ErrorCode::invalid_argument, key + ": empty list");
    }
    return out;
}

} // namespace

PipelineConfig::PipelineConfig() {
    // defaults follow the trained system's published configuration
    entries_ = {
        {"audio.sample_rate", "22050"},
        {"cqt.f_min", "40"},
        {"cqt.bins_per_octave", "12"},
        {"cqt.n_octaves", "6"},
        {"cqt.q_factor", "auto"},
        {"patch.beats", "16"},
        {"patch.subdivisions", "8"},
        {"sampling.delta_p", "16"},
        {"sampling.delta_n_min", "1"},
        {"sampling.delta_n_max", "96"},
        {"arch.conv_channels", "16,32,64,64"},
        {"arch.kernel_time", "6"},
        {"arch.kernel_freq", "4"},
        {"arch.dense_units", "128"},
        {"arch.embedding_dim", "128"},
        {"train.margin", "0.1"},
        {"train.epochs", "240"},
        {"train.batches_per_epoch", "256"},
        {"train.tracks_per_batch", "6"},
        {"train.triplets_per_track", "16"},
        {"train.learning_rate", "0.0001"},
        {"train.adam_beta1", "0.9"},
        {"train.adam_beta2", "0.999"},
        {"train.adam_epsilon", "1e-8"},
        {"train.patch_max_norm", "false"},
        {"segment.median_window", "8"},
        {"segment.kappa", "40"},
        {"segment.sigma", "18.5"},
        {"segment.peak_window", "10"},
        {"segment.peak_threshold", "1.35"},
        {"eval.window_sec", "3.0"},
    };
}

const PipelineConfig::Entry* PipelineConfig::find(const std::string& key) const {
    for (const auto& e : entries_) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

PipelineConfig::Entry* PipelineConfig::find(const std::string& key) {
    for (auto& e : entries_) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    Entry* e = find(key);
    if (e == nullptr) {
        raise(ErrorCode::unknown_config_key, "unknown config key '" + key + "'");
    }
    e->value = strip(value);
}

std::string PipelineConfig::get(const std::string& key) const {
    const Entry* e = find(key);
    if (e == nullptr) {
        raise(ErrorCode::unknown_config_key, "unknown config key '" + key + "'");
    }
    return e->value;
}

std::vector<std::string> PipelineConfig::keys() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.key);
    return out;
}

void PipelineConfig::load_text(const std::string& text,
                               const std::string& origin) {
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            raise(ErrorCode::parse_error,
                  origin + ":" + std::to_string(line_no) +
                      ": expected key = value");
        }
        set(strip(trimmed.substr(0, eq)), strip(trimmed.substr(eq + 1)));
    }
}

void PipelineConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io_failure, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    load_text(buf.str(), path);
}

std::string PipelineConfig::dump() const {
    std::string out;
    for (const auto& e : entries_) {
        out += e.key;
        out += " = ";
        out += e.value;
        out += "\n";
    }
    return out;
}

int PipelineConfig::sample_rate() const {
    const long v = parse_int("audio.sample_rate", get("audio.sample_rate"));
    if (v < 1000) {
        raise(ErrorCode::invalid_argument, "audio.sample_rate too low");
    }
    return static_cast<int>(v);
}

CqtParams PipelineConfig::cqt() const {
    CqtParams p;
    p.f_min = parse_real("cqt.f_min", get("cqt.f_min"));
    p.bins_per_octave = static_cast<int>(
        parse_int("cqt.bins_per_octave", get("cqt.bins_per_octave")));
    p.n_octaves =
        static_cast<int>(parse_int("cqt.n_octaves", get("cqt.n_octaves")));
    const std::string q = get("cqt.q_factor");
    p.q_factor = q == "auto" ? 0.0 : parse_real("cqt.q_factor", q);
    p.validate(sample_rate());
    return p;
}

PatchConfig PipelineConfig::patch() const {
    PatchConfig p;
    p.beats = static_cast<int>(parse_int("patch.beats", get("patch.beats")));
    p.subdivisions = static_cast<int>(
        parse_int("patch.subdivisions", get("patch.subdivisions")));
    p.bins = cqt().bins();
    p.validate();
    return p;
}

SamplingParams PipelineConfig::sampling() const {
    SamplingParams p;
    p.delta_p =
        static_cast<int>(parse_int("sampling.delta_p", get("sampling.delta_p")));
    p.delta_n_min = static_cast<int>(
        parse_int("sampling.delta_n_min", get("sampling.delta_n_min")));
    p.delta_n_max = static_cast<int>(
        parse_int("sampling.delta_n_max", get("sampling.delta_n_max")));
    p.validate();
    return p;
}

nn::ArchConfig PipelineConfig::arch() const {
    nn::ArchConfig a;
    const PatchConfig pc = patch();
    a.input_rows = pc.rows();
    a.input_cols = pc.bins;
    const std::vector<int> channels =
        parse_int_list("arch.conv_channels", get("arch.conv_channels"));
    const int kt =
        static_cast<int>(parse_int("arch.kernel_time", get("arch.kernel_time")));
    const int kf =
        static_cast<int>(parse_int("arch.kernel_freq", get("arch.kernel_freq")));
    a.convs.clear();
    for (int c : channels) a.convs.push_back({kt, kf, c, true});
    a.dense_units = static_cast<int>(
        parse_int("arch.dense_units", get("arch.dense_units")));
    a.embedding_dim = static_cast<int>(
        parse_int("arch.embedding_dim", get("arch.embedding_dim")));
    nn::Layout::from(a); // shape validation
    return a;
}

TrainConfig PipelineConfig::train(std::uint64_t seed, int jobs) const {
    TrainConfig t;
    t.margin = parse_real("train.margin", get("train.margin"));
    t.epochs = static_cast<int>(parse_int("train.epochs", get("train.epochs")));
    t.batches_per_epoch = static_cast<int>(
        parse_int("train.batches_per_epoch", get("train.batches_per_epoch")));
    t.tracks_per_batch = static_cast<int>(
        parse_int("train.tracks_per_batch", get("train.tracks_per_batch")));
    t.triplets_per_track = static_cast<int>(
        parse_int("train.triplets_per_track", get("train.triplets_per_track")));
    t.learning_rate =
        parse_real("train.learning_rate", get("train.learning_rate"));
    t.adam_beta1 = parse_real("train.adam_beta1", get("train.adam_beta1"));
    t.adam_beta2 = parse_real("train.adam_beta2", get("train.adam_beta2"));
    t.adam_epsilon =
        parse_real("train.adam_epsilon", get("train.adam_epsilon"));
    t.patch_max_norm =
        parse_bool("train.patch_max_norm", get("train.patch_max_norm"));
    t.sampling = sampling();
    t.seed = seed;
    t.jobs = jobs;
    t.validate();
    return t;
}

SegmentationParams PipelineConfig::segmentation() const {
    SegmentationParams s;
    s.median_window = static_cast<int>(
        parse_int("segment.median_window", get("segment.median_window")));
    s.kappa = static_cast<int>(parse_int("segment.kappa", get("segment.kappa")));
    s.sigma = parse_real("segment.sigma", get("segment.sigma"));
    s.peak_half_window = static_cast<int>(
        parse_int("segment.peak_window", get("segment.peak_window")));
    s.peak_threshold =
        parse_real("segment.peak_threshold", get("segment.peak_threshold"));
    if (s.median_window < 1 || s.kappa < 2 || s.sigma <= 0.0 ||
        s.peak_half_window < 1 || s.peak_threshold <= 0.0) {
        raise(ErrorCode::invalid_argument, "bad segmentation parameters");
    }
    return s;
}

double PipelineConfig::eval_window_sec() const {
    const double w = parse_real("eval.window_sec", get("eval.window_sec"));
    if (w <= 0.0) {
        raise(ErrorCode::invalid_argument, "eval.window_sec must be positive");
    }
    return w;
}

} // namespace segbed
