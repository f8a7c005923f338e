#pragma once

#include "audio.hpp"

#include <string>
#include <vector>

namespace segbed {

struct BeatGrid {
    std::vector<double> beat_times; // seconds, strictly increasing

    std::size_t count() const { return beat_times.size(); }
};

// Beat tracking: spectral-flux onset envelope from a short-time transform,
// tempo by envelope autocorrelation over 60-180 BPM (with a mild 120 BPM
// prior against octave errors), then dynamic programming that maximizes
// onset strength under a log-Gaussian tempo-deviation penalty. Silent or
// otherwise unbeatable input falls back to a uniform 120 BPM grid.
BeatGrid track_beats(const AudioBuffer& audio);

// Uniform grid helper, also used as the silence fallback.
BeatGrid uniform_beat_grid(double duration_sec, double bpm);

// Beat override file: one beat time in seconds per line.
BeatGrid read_beats_file(const std::string& path);
void write_beats_file(const BeatGrid& beats, const std::string& path);

} // namespace segbed
