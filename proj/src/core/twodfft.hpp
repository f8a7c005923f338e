#pragma once

#include <vector>

namespace segbed {

// Log-magnitude of the 2D Fourier transform of a (time x frequency)
// log-magnitude matrix, flattened frequency-major. Invariant to circular
// translation of the input along either axis. Used to score which side of
// an anchor beat is more likely to share its musical segment.
std::vector<float> twodfft_feature(const std::vector<float>& values,
                                   std::size_t time_rows,
                                   std::size_t freq_cols);

} // namespace segbed
