// segbed command line tool. Links the shared library's C API only.

#include <segbed/segbed.h>

#include <CLI11.hpp>

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct ConfigHandle {
    segbed_config* cfg = segbed_config_new();
    ~ConfigHandle() { segbed_config_free(cfg); }
};

[[noreturn]] void fail(const std::string& context, int status) {
    std::cerr << "segbed: " << context << ": "
              << segbed_status_name(status) << ": " << segbed_last_error()
              << "\n";
    std::exit(1);
}

void check(int status, const std::string& context) {
    if (status != SEGBED_OK) fail(context, status);
}

// --config file plus repeated --set key=value overrides.
void apply_config(ConfigHandle& handle, const std::string& config_file,
                  const std::vector<std::string>& overrides) {
    if (!config_file.empty()) {
        check(segbed_config_load_file(handle.cfg, config_file.c_str()),
              "loading " + config_file);
    }
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "segbed: --set expects key=value, got '" << kv
                      << "'\n";
            std::exit(1);
        }
        check(segbed_config_set(handle.cfg, kv.substr(0, eq).c_str(),
                                kv.substr(eq + 1).c_str()),
              "--set " + kv);
    }
}

int config_int(const ConfigHandle& handle, const char* key) {
    char buf[64];
    check(segbed_config_get(handle.cfg, key, buf, sizeof(buf)),
          std::string("reading ") + key);
    return std::atoi(buf);
}

int resolve_jobs_flag(int jobs) {
    if (jobs > 0) return jobs;
    if (const char* env = std::getenv("SEGBED_JOBS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Work list runner with skip-and-log fault isolation. fn returns an error
// message on failure, empty on success.
int run_tracks(const std::vector<std::string>& items, int jobs,
               const std::function<std::string(const std::string&)>& fn) {
    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            const std::string err = fn(items[i]);
            if (!err.empty()) {
                std::lock_guard<std::mutex> lock(log_mutex);
                std::cerr << "segbed: skipping " << items[i] << ": " << err
                          << "\n";
                failures.fetch_add(1);
            }
        }
    };
    const int n_workers =
        std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
    std::vector<std::thread> threads;
    for (int w = 1; w < n_workers; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    return failures.load();
}

std::vector<std::string> wav_files(const std::string& dir) {
    std::vector<std::string> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".wav") {
            files.push_back(entry.path().string());
        }
    }
    if (ec) {
        std::cerr << "segbed: cannot read directory " << dir << "\n";
        std::exit(1);
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<std::string> store_dirs(const std::string& dataset_dir) {
    std::vector<std::string> dirs;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dataset_dir, ec)) {
        if (entry.is_directory() &&
            fs::exists(entry.path() / "manifest.json")) {
            dirs.push_back(entry.path().string());
        }
    }
    if (ec) {
        std::cerr << "segbed: cannot read directory " << dataset_dir << "\n";
        std::exit(1);
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        const auto comma = csv.find(',', pos);
        const std::string item =
            csv.substr(pos, comma == std::string::npos ? std::string::npos
                                                       : comma - pos);
        out.push_back(std::atoi(item.c_str()));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"segbed: unsupervised music structure segmentation"};
    app.require_subcommand(1);
    app.fallthrough(); // parent options may follow the subcommand

    std::string config_file;
    std::vector<std::string> overrides;
    int jobs = 0;
    app.add_option("--config", config_file, "configuration file")
        ->envname("SEGBED_CONFIG");
    app.add_option("--set", overrides, "override a config key (key=value)");
    app.add_option("--jobs", jobs,
                   "parallel workers (default: SEGBED_JOBS or all cores)");

    // ---------------------------------------------------------------- features
    auto* features = app.add_subcommand(
        "features", "extract beat-synchronized feature stores from WAV files");
    std::string audio_dir, features_out, beats_dir;
    features->add_option("audio_dir", audio_dir, "directory of WAV files")
        ->required();
    features->add_option("out_dir", features_out, "output dataset directory")
        ->required();
    features->add_option("--beats-dir", beats_dir,
                         "per-track beat override files (<stem>.txt), "
                         "bypassing the tracker");

    // ------------------------------------------------------------------- train
    auto* train_cmd = app.add_subcommand(
        "train", "train the embedding model on feature stores");
    std::string train_stores, model_out, sampler = "unbiased";
    std::string loss_csv, triplet_log;
    std::uint64_t train_seed = 0;
    bool verbose = false;
    train_cmd->add_option("store_dir", train_stores, "dataset directory")
        ->required();
    train_cmd->add_option("out_model", model_out, "checkpoint path")
        ->required();
    train_cmd->add_option("--sampler", sampler, "unbiased | biased")
        ->check(CLI::IsMember({"unbiased", "biased"}));
    train_cmd->add_option("--seed", train_seed, "random seed");
    train_cmd->add_option("--loss-csv", loss_csv,
                          "write epoch,mean_loss,wall_sec");
    train_cmd->add_option("--triplet-log", triplet_log,
                          "write every sampled triplet");
    train_cmd->add_flag("--verbose", verbose, "per-epoch progress on stderr");

    // ----------------------------------------------------------------- segment
    auto* segment_cmd = app.add_subcommand(
        "segment", "detect segment boundaries for every store");
    std::string seg_stores, seg_model, seg_out;
    bool dump = false, raw_baseline = false;
    segment_cmd->add_option("store_dir", seg_stores, "dataset directory")
        ->required();
    segment_cmd->add_option("model", seg_model, "model checkpoint")
        ->required();
    segment_cmd->add_option("out_dir", seg_out, "output directory")
        ->required();
    segment_cmd->add_flag("--dump", dump, "also write SSM and novelty dumps");
    segment_cmd->add_flag(
        "--raw", raw_baseline,
        "mean-pooled raw patches instead of the embedding (sanity baseline; "
        "the model argument is ignored)");

    // -------------------------------------------------------------------- eval
    auto* eval_cmd = app.add_subcommand(
        "eval", "trimmed boundary hit rate against reference annotations");
    std::string est_dir, ref_dir, eval_out;
    double eval_window = 3.0;
    eval_cmd->add_option("est_dir", est_dir, "boundary CSVs")->required();
    eval_cmd->add_option("ref_dir", ref_dir, "reference TSVs")->required();
    eval_cmd->add_option("out_json", eval_out, "metrics report")->required();
    eval_cmd->add_option("--window", eval_window, "tolerance in seconds");

    // -------------------------------------------------------------------- fpfn
    auto* fpfn_cmd = app.add_subcommand(
        "fpfn", "closed-form vs Monte Carlo sampling error rates");
    std::string fpfn_out = "fpfn.csv";
    std::string dp_list = "4,8,16,32", dnmin_list = "1", dnmax_list = "96";
    int fpfn_segments = 15, fpfn_labels = 15;
    long fpfn_len_min = 64, fpfn_len_max = 64, fpfn_trials = 100000;
    std::uint64_t fpfn_seed = 0;
    bool fpfn_biased = false;
    fpfn_cmd->add_option("--out", fpfn_out, "output CSV");
    fpfn_cmd->add_option("--delta-p", dp_list, "comma list of delta_p values");
    fpfn_cmd->add_option("--delta-n-min", dnmin_list, "comma list");
    fpfn_cmd->add_option("--delta-n-max", dnmax_list, "comma list");
    fpfn_cmd->add_option("--segments", fpfn_segments, "synthetic segments");
    fpfn_cmd->add_option("--seg-len-min", fpfn_len_min, "beats");
    fpfn_cmd->add_option("--seg-len-max", fpfn_len_max, "beats");
    fpfn_cmd->add_option("--labels", fpfn_labels, "label count");
    fpfn_cmd->add_option("--trials", fpfn_trials, "Monte Carlo trials");
    fpfn_cmd->add_option("--seed", fpfn_seed, "random seed");
    fpfn_cmd->add_flag("--biased", fpfn_biased, "biased sampler");

    // ------------------------------------------------------------------- synth
    auto* synth_cmd = app.add_subcommand(
        "synth", "generate a synthetic WAV corpus with exact annotations");
    std::string synth_out;
    int synth_tracks = 20;
    int tex_min = 3, tex_max = 5, seg_min = 4, seg_max = 8;
    int slen_min = 48, slen_max = 72;
    double tempo = 120.0;
    std::uint64_t synth_seed = 0;
    synth_cmd->add_option("out_dir", synth_out, "output directory")
        ->required();
    synth_cmd->add_option("n_tracks", synth_tracks, "number of tracks")
        ->required();
    synth_cmd->add_option("--textures-min", tex_min, "textures per track");
    synth_cmd->add_option("--textures-max", tex_max, "textures per track");
    synth_cmd->add_option("--segments-min", seg_min, "segments per track");
    synth_cmd->add_option("--segments-max", seg_max, "segments per track");
    synth_cmd->add_option("--seg-len-min", slen_min, "segment length, beats");
    synth_cmd->add_option("--seg-len-max", slen_max, "segment length, beats");
    synth_cmd->add_option("--tempo", tempo, "BPM");
    synth_cmd->add_option("--seed", synth_seed, "random seed");

    // ------------------------------------------------------------- dump-config
    auto* dump_cmd =
        app.add_subcommand("dump-config", "print the effective configuration");

    CLI11_PARSE(app, argc, argv);

    ConfigHandle cfg;
    apply_config(cfg, config_file, overrides);
    const int n_jobs = resolve_jobs_flag(jobs);

    if (*features) {
        const auto files = wav_files(audio_dir);
        if (files.empty()) {
            std::cerr << "segbed: no WAV files in " << audio_dir << "\n";
            return 1;
        }
        fs::create_directories(features_out);
        const int target_rate = config_int(cfg, "audio.sample_rate");
        const int failures =
            run_tracks(files, n_jobs, [&](const std::string& path) {
                const std::string stem = fs::path(path).stem().string();
                segbed_audio* audio = nullptr;
                int rc = segbed_audio_load(path.c_str(), target_rate, &audio);
                if (rc != SEGBED_OK) return std::string(segbed_last_error());

                segbed_beats* beats = nullptr;
                if (!beats_dir.empty()) {
                    const std::string beats_path =
                        (fs::path(beats_dir) / (stem + ".txt")).string();
                    rc = segbed_beats_load(beats_path.c_str(), &beats);
                } else {
                    rc = segbed_track_beats(audio, &beats);
                }
                if (rc != SEGBED_OK) {
                    segbed_audio_free(audio);
                    return std::string(segbed_last_error());
                }

                segbed_store* store = nullptr;
                rc = segbed_store_build(audio, beats, cfg.cfg, stem.c_str(),
                                        &store);
                if (rc == SEGBED_OK) {
                    rc = segbed_store_save(store, features_out.c_str());
                }
                const std::string err =
                    rc == SEGBED_OK ? "" : segbed_last_error();
                segbed_store_free(store);
                segbed_beats_free(beats);
                segbed_audio_free(audio);
                return err;
            });
        if (failures > 0) {
            std::cerr << "segbed: " << failures << " of " << files.size()
                      << " tracks skipped\n";
        }
        std::cout << "features: " << files.size() - failures << " stores in "
                  << features_out << "\n";
        return 0;
    }

    if (*train_cmd) {
        const auto dirs = store_dirs(train_stores);
        if (dirs.empty()) {
            std::cerr << "segbed: no feature stores in " << train_stores
                      << "\n";
            return 1;
        }
        std::vector<const char*> dir_ptrs;
        for (const auto& d : dirs) dir_ptrs.push_back(d.c_str());
        segbed_model* model = nullptr;
        check(segbed_train(dir_ptrs.data(), dir_ptrs.size(), cfg.cfg,
                           sampler.c_str(), train_seed, n_jobs,
                           loss_csv.empty() ? nullptr : loss_csv.c_str(),
                           triplet_log.empty() ? nullptr : triplet_log.c_str(),
                           verbose ? 1 : 0, &model),
              "training");
        check(segbed_model_save(model, model_out.c_str()), "saving model");
        segbed_model_free(model);
        std::cout << "train: sampler=" << sampler << " seed=" << train_seed
                  << " tracks=" << dirs.size() << " -> " << model_out << "\n";
        return 0;
    }

    if (*segment_cmd) {
        const auto dirs = store_dirs(seg_stores);
        if (dirs.empty()) {
            std::cerr << "segbed: no feature stores in " << seg_stores << "\n";
            return 1;
        }
        segbed_model* model = nullptr;
        if (!raw_baseline) {
            check(segbed_model_load(seg_model.c_str(), &model),
                  "loading model");
        }
        fs::create_directories(seg_out);
        const int failures =
            run_tracks(dirs, n_jobs, [&](const std::string& dir) {
                segbed_store* store = nullptr;
                int rc = segbed_store_open(dir.c_str(), &store);
                if (rc != SEGBED_OK) return std::string(segbed_last_error());
                const std::string stem = segbed_store_track_id(store);

                segbed_embedding* emb = nullptr;
                rc = raw_baseline ? segbed_embed_raw_mean(store, &emb)
                                  : segbed_embed(model, store, 1, &emb);
                segbed_beats* beats = nullptr;
                if (rc == SEGBED_OK) rc = segbed_store_beats(store, &beats);

                segbed_boundaries* bounds = nullptr;
                std::string dump_base;
                if (rc == SEGBED_OK) {
                    if (dump) {
                        dump_base = (fs::path(seg_out) / stem).string();
                    }
                    rc = segbed_segment(emb, beats, cfg.cfg,
                                        dump_base.empty()
                                            ? nullptr
                                            : dump_base.c_str(),
                                        &bounds);
                }
                if (rc == SEGBED_OK) {
                    const std::string csv =
                        (fs::path(seg_out) / (stem + ".csv")).string();
                    rc = segbed_boundaries_write_csv(bounds, csv.c_str());
                }
                const std::string err =
                    rc == SEGBED_OK ? "" : segbed_last_error();
                segbed_boundaries_free(bounds);
                segbed_beats_free(beats);
                segbed_embedding_free(emb);
                segbed_store_free(store);
                return err;
            });
        segbed_model_free(model);
        if (failures > 0) {
            std::cerr << "segbed: " << failures << " of " << dirs.size()
                      << " tracks skipped\n";
        }
        std::cout << "segment: " << dirs.size() - failures
                  << " boundary files in " << seg_out << "\n";
        return 0;
    }

    if (*eval_cmd) {
        // union of track stems from both sides; a missing counterpart is a
        // per-track error, not a fatal one
        std::set<std::string> stems;
        std::size_t n_refs = 0;
        for (const auto& entry : fs::directory_iterator(ref_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".tsv") {
                stems.insert(entry.path().stem().string());
                ++n_refs;
            }
        }
        if (n_refs == 0) {
            std::cerr << "segbed: no reference TSVs in " << ref_dir << "\n";
            return 1;
        }
        std::error_code est_ec;
        for (const auto& entry : fs::directory_iterator(est_dir, est_ec)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") {
                stems.insert(entry.path().stem().string());
            }
        }
        segbed_report* report = segbed_report_new(eval_window);
        for (const auto& stem : stems) {
            const std::string ref_path =
                (fs::path(ref_dir) / (stem + ".tsv")).string();
            const std::string est_path =
                (fs::path(est_dir) / (stem + ".csv")).string();
            if (!fs::exists(ref_path)) {
                segbed_report_add_error(report, stem.c_str(),
                                        "missing reference annotations");
                continue;
            }

            segbed_annotations* ann = nullptr;
            int rc = segbed_annotations_load(ref_path.c_str(), &ann);
            if (rc != SEGBED_OK) {
                segbed_report_add_error(report, stem.c_str(),
                                        segbed_last_error());
                continue;
            }
            segbed_boundaries* est = nullptr;
            if (!fs::exists(est_path)) {
                segbed_report_add_error(report, stem.c_str(),
                                        "missing boundary estimates");
                segbed_annotations_free(ann);
                continue;
            }
            rc = segbed_boundaries_load_csv(est_path.c_str(), &est);
            if (rc != SEGBED_OK) {
                segbed_report_add_error(report, stem.c_str(),
                                        segbed_last_error());
                segbed_annotations_free(ann);
                continue;
            }
            std::vector<double> est_times;
            for (size_t i = 0; i < segbed_boundaries_count(est); ++i) {
                double t = 0;
                segbed_boundaries_get(est, i, nullptr, &t);
                est_times.push_back(t);
            }
            segbed_metrics metrics{};
            rc = segbed_eval_boundaries(
                est_times.data(), est_times.size(),
                segbed_annotations_boundaries(ann),
                segbed_annotations_boundary_count(ann),
                segbed_annotations_duration(ann), eval_window, &metrics);
            if (rc == SEGBED_OK) {
                segbed_report_add(report, stem.c_str(), &metrics);
            } else {
                segbed_report_add_error(report, stem.c_str(),
                                        segbed_last_error());
            }
            segbed_boundaries_free(est);
            segbed_annotations_free(ann);
        }
        segbed_metrics mean{}, stdev{};
        check(segbed_report_finish(report, eval_out.c_str(), &mean, &stdev),
              "writing report");
        segbed_report_free(report);
        std::printf(
            "eval @%.1fs: F %.3f +/- %.2f  P %.3f +/- %.2f  R %.3f +/- %.2f"
            " -> %s\n",
            eval_window, mean.f_measure, stdev.f_measure, mean.precision,
            stdev.precision, mean.recall, stdev.recall, eval_out.c_str());
        return 0;
    }

    if (*fpfn_cmd) {
        const auto dp = parse_int_list(dp_list);
        const auto dnmin = parse_int_list(dnmin_list);
        const auto dnmax = parse_int_list(dnmax_list);
        check(segbed_fpfn_run(dp.data(), dp.size(), dnmin.data(), dnmin.size(),
                              dnmax.data(), dnmax.size(), fpfn_segments,
                              fpfn_len_min, fpfn_len_max, fpfn_labels,
                              fpfn_trials, fpfn_seed, fpfn_biased ? 1 : 0,
                              fpfn_out.c_str()),
              "fpfn sweep");
        std::cout << "fpfn: wrote " << fpfn_out << "\n";
        return 0;
    }

    if (*synth_cmd) {
        check(segbed_synth_corpus(synth_out.c_str(), synth_tracks, synth_seed,
                                  seg_min, seg_max, slen_min, slen_max,
                                  tex_min, tex_max, tempo, 22050),
              "synthesizing corpus");
        std::cout << "synth: " << synth_tracks << " tracks in " << synth_out
                  << "\n";
        return 0;
    }

    if (*dump_cmd) {
        size_t len = 0;
        check(segbed_config_format(cfg.cfg, nullptr, 0, &len), "dump-config");
        std::vector<char> buf(len);
        check(segbed_config_format(cfg.cfg, buf.data(), buf.size(), &len),
              "dump-config");
        std::fputs(buf.data(), stdout);
        return 0;
    }

    return 1;
}
