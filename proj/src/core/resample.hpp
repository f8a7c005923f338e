#pragma once

#include <vector>

namespace segbed {

// Windowed-sinc sample rate conversion (Hann-windowed, 16 sinc lobes each
// side at the effective cutoff). Output length is round(n * to_rate / from_rate);
// samples beyond the input edges are treated as zero.
std::vector<float> resample(const std::vector<float>& input, int from_rate,
                            int to_rate);

} // namespace segbed
