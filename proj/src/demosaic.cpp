#include "spxtrack/demosaic.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace spx {

namespace {

// Channel of the mosaic sample at (x,y): 0=R, 1=G, 2=B.
int bayer_channel(BayerPattern p, int x, int y) {
    const int px = x & 1;
    const int py = y & 1;
    switch (p) {
    case BayerPattern::RGGB:
        return py == 0 ? (px == 0 ? 0 : 1) : (px == 0 ? 1 : 2);
    case BayerPattern::BGGR:
        return py == 0 ? (px == 0 ? 2 : 1) : (px == 0 ? 1 : 0);
    case BayerPattern::GRBG:
        return py == 0 ? (px == 0 ? 1 : 0) : (px == 0 ? 2 : 1);
    case BayerPattern::GBRG:
        return py == 0 ? (px == 0 ? 1 : 2) : (px == 0 ? 0 : 1);
    }
    return 1;
}

} // namespace

BayerPattern bayer_pattern_from_string(const std::string& name) {
    std::string s;
    for (char c : name)
        s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (s == "RGGB") return BayerPattern::RGGB;
    if (s == "BGGR") return BayerPattern::BGGR;
    if (s == "GRBG") return BayerPattern::GRBG;
    if (s == "GBRG") return BayerPattern::GBRG;
    throw std::invalid_argument("unknown Bayer pattern '" + name + "'");
}

Frame demosaic(const std::vector<std::uint8_t>& plane, int width, int height,
               BayerPattern pattern, int index) {
    if (width <= 0 || height <= 0 || (width % 2) != 0 || (height % 2) != 0)
        throw std::invalid_argument("demosaic: dimensions must be positive and even");
    if (plane.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("demosaic: plane size does not match dimensions");

    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int native = bayer_channel(pattern, x, y);
            int sum[3] = {0, 0, 0};
            int cnt[3] = {0, 0, 0};
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = std::clamp(x + dx, 0, width - 1);
                    const int ny = std::clamp(y + dy, 0, height - 1);
                    const int ch = bayer_channel(pattern, nx, ny);
                    sum[ch] += plane[static_cast<std::size_t>(ny) * width + nx];
                    cnt[ch] += 1;
                }
            }
            const std::size_t o = (static_cast<std::size_t>(y) * width + x) * 3;
            for (int ch = 0; ch < 3; ++ch) {
                if (ch == native)
                    rgb[o + ch] = plane[static_cast<std::size_t>(y) * width + x];
                else
                    rgb[o + ch] = static_cast<std::uint8_t>(
                        (sum[ch] + cnt[ch] / 2) / std::max(cnt[ch], 1));
            }
        }
    }
    return Frame(width, height, std::move(rgb), index);
}

} // namespace spx
