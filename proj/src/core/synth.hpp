#pragma once

#include "evaluation.hpp"
#include "rng.hpp"

#include <string>
#include <vector>

namespace segbed {

// Procedural corpus generation: each track concatenates 4-8 segments of
// distinct textures (chord loop, register, partial structure, rhythm and an
// 8-bar intensity cycle) at a fixed tempo, with exact boundary annotations.
struct SynthParams {
    int n_segments_min = 4;
    int n_segments_max = 8;
    int seg_len_min_beats = 48; // segment lengths are rounded to whole bars
    int seg_len_max_beats = 72;
    int n_textures_min = 3;
    int n_textures_max = 5;
    double tempo_bpm = 120.0;
    int sample_rate = 22050;
};

struct SynthTrack {
    std::vector<float> samples;
    int sample_rate = 22050;
    int total_beats = 0;
    AnnotationSet annotations; // label = texture letter
};

SynthTrack synth_track(std::uint64_t seed, const SynthParams& params);

// Writes <out_dir>/track_NNN.wav (PCM16) and .tsv for n_tracks tracks; track
// i uses seed + i. Returns the track stems in order.
std::vector<std::string> synth_corpus(const std::string& out_dir, int n_tracks,
                                      std::uint64_t seed,
                                      const SynthParams& params);

} // namespace segbed
