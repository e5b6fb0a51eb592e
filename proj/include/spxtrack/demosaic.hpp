#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spxtrack/frame.hpp"

namespace spx {

enum class BayerPattern { RGGB, BGGR, GRBG, GBRG };

BayerPattern bayer_pattern_from_string(const std::string& name);

// Bilinear demosaic of a single-plane Bayer mosaic. Dimensions must be even.
// Each output pixel keeps its native sample and fills the two missing
// channels from same-channel neighbors in its (border-clamped) 3x3
// neighborhood.
Frame demosaic(const std::vector<std::uint8_t>& plane, int width, int height,
               BayerPattern pattern, int index = 0);

} // namespace spx
