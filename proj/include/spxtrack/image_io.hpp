#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spxtrack/frame.hpp"

namespace spx {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

// Readers dispatch on file content (PNG signature vs. PPM/PGM magic).
Frame read_image(const std::filesystem::path& path, int index = 0);
GrayImage read_gray_image(const std::filesystem::path& path);

void write_ppm(const std::filesystem::path& path, const Frame& frame);
void write_png(const std::filesystem::path& path, const Frame& frame);
// 16-bit single-channel PNG, used for segmentation label maps.
void write_png_gray16(const std::filesystem::path& path,
                      const std::vector<std::uint16_t>& pixels, int width,
                      int height);

// Files named cam<K>_<NNNNNN>.<ext> for one camera, sorted by frame number.
std::vector<std::filesystem::path>
list_camera_sequence(const std::filesystem::path& dir, int cam_id);

} // namespace spx
