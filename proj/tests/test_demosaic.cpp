#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "spxtrack/demosaic.hpp"

using namespace spx;

namespace {

// Independent per-pixel interpolation oracle: native sample kept, missing
// channels averaged (rounded) over same-channel samples in the clamped 3x3
// neighborhood, counting clamped duplicates like the border extension does.
int oracle_channel_rggb(int x, int y) {
    const int px = x & 1, py = y & 1;
    if (py == 0)
        return px == 0 ? 0 : 1;
    return px == 0 ? 1 : 2;
}

std::uint8_t oracle_pixel(const std::vector<std::uint8_t>& plane, int w, int h,
                          int x, int y, int ch) {
    if (oracle_channel_rggb(x, y) == ch)
        return plane[y * w + x];
    int sum = 0, cnt = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            const int nx = std::clamp(x + dx, 0, w - 1);
            const int ny = std::clamp(y + dy, 0, h - 1);
            if (oracle_channel_rggb(nx, ny) == ch) {
                sum += plane[ny * w + nx];
                cnt += 1;
            }
        }
    return static_cast<std::uint8_t>((sum + cnt / 2) / cnt);
}

} // namespace

TEST_CASE("demosaic of a constant plane is constant") {
    std::vector<std::uint8_t> plane(8 * 6, 123);
    for (auto pattern : {BayerPattern::RGGB, BayerPattern::BGGR, BayerPattern::GRBG,
                         BayerPattern::GBRG}) {
        const Frame f = demosaic(plane, 8, 6, pattern);
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 8; ++x) {
                CHECK(f.r(x, y) == 123);
                CHECK(f.g(x, y) == 123);
                CHECK(f.b(x, y) == 123);
            }
    }
}

TEST_CASE("demosaic matches the per-pixel interpolation oracle on a 4x4 mosaic") {
    const std::vector<std::uint8_t> plane = {10,  20,  30,  40,  50,  60,  70,  80,
                                             90,  100, 110, 120, 130, 140, 150, 160};
    const Frame f = demosaic(plane, 4, 4, BayerPattern::RGGB);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
            CHECK(f.r(x, y) == oracle_pixel(plane, 4, 4, x, y, 0));
            CHECK(f.g(x, y) == oracle_pixel(plane, 4, 4, x, y, 1));
            CHECK(f.b(x, y) == oracle_pixel(plane, 4, 4, x, y, 2));
        }
}

TEST_CASE("demosaic rejects odd dimensions") {
    std::vector<std::uint8_t> plane(3 * 4, 0);
    CHECK_THROWS_AS(demosaic(plane, 3, 4, BayerPattern::RGGB), std::invalid_argument);
    CHECK_THROWS_AS(demosaic(plane, 4, 3, BayerPattern::RGGB), std::invalid_argument);
}

TEST_CASE("demosaic is translation-equivariant away from a 2-pixel border") {
    std::mt19937 rng(7);
    const int w = 16, h = 12;
    std::vector<std::uint8_t> plane(w * h);
    for (auto& p : plane)
        p = static_cast<std::uint8_t>(rng() % 256);

    // Shift by 2 in x keeps the Bayer phase.
    std::vector<std::uint8_t> shifted(w * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x + 2 < w; ++x)
            shifted[y * w + x + 2] = plane[y * w + x];

    const Frame a = demosaic(plane, w, h, BayerPattern::GBRG);
    const Frame b = demosaic(shifted, w, h, BayerPattern::GBRG);
    for (int y = 2; y < h - 2; ++y)
        for (int x = 2; x + 4 < w - 2; ++x) {
            CHECK(a.r(x, y) == b.r(x + 2, y));
            CHECK(a.g(x, y) == b.g(x + 2, y));
            CHECK(a.b(x, y) == b.b(x + 2, y));
        }
}

TEST_CASE("bayer_pattern_from_string") {
    CHECK(bayer_pattern_from_string("rggb") == BayerPattern::RGGB);
    CHECK(bayer_pattern_from_string("GBRG") == BayerPattern::GBRG);
    CHECK_THROWS_AS(bayer_pattern_from_string("nope"), std::invalid_argument);
}
