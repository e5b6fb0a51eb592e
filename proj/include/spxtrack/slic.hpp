#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "spxtrack/frame.hpp"

namespace spx {

struct SlicParams {
    int n_superpixels = 100;
    double compactness = 10.0; // color normalizer Nc
    int max_iters = 10;
    int min_region = 0; // pixels; 0 -> S*S/16
    int n_workers = 0;  // 0 -> hardware concurrency
    enum class ColorSpace { Rgb, Hsv } color_space = ColorSpace::Rgb;
};

struct Superpixel {
    int label = 0;
    int pixel_count = 0;
    double cx = 0; // centroid, x = column
    double cy = 0; // centroid, y = row
    double mean_sat = 0;
    double mean_hue = 0; // circular mean on [0,1)
    double mean_gray = 0;
    double mean_red = 0;
    double mean_green = 0;
    double mean_blue = 0;
};

struct Segmentation {
    int width = 0;
    int height = 0;
    int n_labels = 0;
    std::vector<std::int32_t> labels; // width*height, row-major, 0..n_labels-1

    std::int32_t label_at(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
};

double color_distance(const std::array<double, 3>& a, const std::array<double, 3>& b);
double spatial_distance(double x0, double y0, double x1, double y1);
double combined_distance(double dc, double dp, double nc, double np);

// SLIC clustering over joint color+position space with a 2S x 2S search
// window per cluster, followed by a connectivity pass that merges regions
// smaller than min_region into their largest neighbor. Deterministic for
// fixed inputs regardless of worker count. objective_out, when given,
// receives the within-cluster squared combined-distance energy after each
// assignment pass.
Segmentation slic_segment(const Frame& image, const SlicParams& params,
                          std::vector<double>* objective_out = nullptr);

// Per-label centroid and channel means; hue averaged circularly.
std::vector<Superpixel> superpixel_stats(const Segmentation& seg, const Frame& frame);

// Debug surfaces: label map as 16-bit pixels, and a boundary overlay.
std::vector<std::uint16_t> labels_to_gray16(const Segmentation& seg);
Frame overlay_boundaries(const Frame& frame, const Segmentation& seg);

} // namespace spx
