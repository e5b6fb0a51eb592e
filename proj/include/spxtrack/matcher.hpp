#pragma once

#include <array>
#include <span>
#include <vector>

#include "spxtrack/geometry.hpp"
#include "spxtrack/slic.hpp"

namespace spx {

// Channel means of a detected marker superpixel, all on [0,1].
struct MarkerAppearance {
    double mean_sat = 0;
    double mean_hue = 0;
    double mean_gray = 0;
};

// Seven nonnegative mismatch magnitudes per candidate superpixel:
//   f1/f3/f5: |mean S/H/gray difference| against the previous detection
//   f2/f4/f6: the same against the initial detection
//   f7:       centroid distance to the predicted image point, px
struct FeatureVector {
    std::array<double, 7> f{};
};

struct Weights {
    std::array<double, 7> w{3, 1, 3, 2, 2, 1, 3};
};

// min(|dh|, 1-|dh|) scaled by 2 so the full range occupies [0,1].
double circular_hue_distance(double h0, double h1);

FeatureVector extract_features(const Superpixel& sp,
                               const MarkerAppearance& previous,
                               const MarkerAppearance& initial,
                               const Point2& predicted);

// Column-wise min-max scaling across candidates; a degenerate column
// (max == min) maps to all zeros so a lone candidate scores perfectly.
std::vector<std::array<double, 7>>
normalize_features(std::span<const FeatureVector> features);

struct Selection {
    int index = -1;
    double score = 0; // weighted normalized mismatch of the winner
};

// Winner = argmin over candidates of sum_k w[k] * N[k]; ties broken by
// smaller f7, then lower candidate index.
Selection select(std::span<const std::array<double, 7>> normalized,
                 const Weights& weights);

// normalize + select in one call, from raw feature vectors.
Selection select_best(std::span<const FeatureVector> features,
                      const Weights& weights);

struct MatchGate {
    double max_jump_px = 50.0;    // bound on f7, inclusive
    double max_appearance = 0.35; // bound on f1, inclusive
};

bool gate_accepts(const FeatureVector& raw, const MatchGate& gate);

// Full-frame superpixel count for a marker of marker_pixels area:
// round(2*w*h / marker_pixels), clamped to [16, w*h/4].
int nslic(int marker_pixels, int frame_w, int frame_h);

// The same count rescaled to a sub-image of the frame.
int scale_superpixel_count(int frame_count, int frame_w, int frame_h,
                           int sub_w, int sub_h);

} // namespace spx
