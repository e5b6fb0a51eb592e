#include "spxtrack/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spx {

double circular_hue_distance(double h0, double h1) {
    double d = std::abs(h0 - h1);
    d = std::min(d, 1.0 - d);
    return 2.0 * d;
}

FeatureVector extract_features(const Superpixel& sp,
                               const MarkerAppearance& previous,
                               const MarkerAppearance& initial,
                               const Point2& predicted) {
    FeatureVector out;
    out.f[0] = std::abs(sp.mean_sat - previous.mean_sat);
    out.f[1] = std::abs(sp.mean_sat - initial.mean_sat);
    out.f[2] = circular_hue_distance(sp.mean_hue, previous.mean_hue);
    out.f[3] = circular_hue_distance(sp.mean_hue, initial.mean_hue);
    out.f[4] = std::abs(sp.mean_gray - previous.mean_gray);
    out.f[5] = std::abs(sp.mean_gray - initial.mean_gray);
    const double du = sp.cx - predicted.u;
    const double dv = sp.cy - predicted.v;
    out.f[6] = std::sqrt(du * du + dv * dv);
    return out;
}

std::vector<std::array<double, 7>>
normalize_features(std::span<const FeatureVector> features) {
    if (features.empty())
        throw std::invalid_argument("normalize_features: empty candidate set");
    std::array<double, 7> lo{};
    std::array<double, 7> hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& fv : features) {
        for (int k = 0; k < 7; ++k) {
            lo[k] = std::min(lo[k], fv.f[k]);
            hi[k] = std::max(hi[k], fv.f[k]);
        }
    }
    std::vector<std::array<double, 7>> out(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (int k = 0; k < 7; ++k) {
            const double range = hi[k] - lo[k];
            out[i][k] = range > 0 ? (features[i].f[k] - lo[k]) / range : 0.0;
        }
    }
    return out;
}

Selection select(std::span<const std::array<double, 7>> normalized,
                 const Weights& weights) {
    if (normalized.empty())
        throw std::invalid_argument("select: empty candidate set");
    for (double w : weights.w)
        if (!(w > 0))
            throw std::invalid_argument("select: weights must be positive");
    Selection best;
    for (std::size_t i = 0; i < normalized.size(); ++i) {
        double score = 0;
        for (int k = 0; k < 7; ++k)
            score += weights.w[k] * normalized[i][k];
        const bool wins =
            best.index < 0 || score < best.score ||
            (score == best.score &&
             normalized[i][6] < normalized[best.index][6]);
        if (wins) {
            best.index = static_cast<int>(i);
            best.score = score;
        }
    }
    return best;
}

Selection select_best(std::span<const FeatureVector> features,
                      const Weights& weights) {
    const auto normalized = normalize_features(features);
    return select(normalized, weights);
}

bool gate_accepts(const FeatureVector& raw, const MatchGate& gate) {
    return raw.f[6] <= gate.max_jump_px && raw.f[0] <= gate.max_appearance;
}

int nslic(int marker_pixels, int frame_w, int frame_h) {
    if (marker_pixels < 1)
        throw std::invalid_argument("nslic: marker_pixels must be at least 1");
    const long pixels = static_cast<long>(frame_w) * frame_h;
    const long count = std::lround(2.0 * pixels / marker_pixels);
    return static_cast<int>(std::clamp<long>(count, 16, pixels / 4));
}

int scale_superpixel_count(int frame_count, int frame_w, int frame_h,
                           int sub_w, int sub_h) {
    const double ratio = static_cast<double>(sub_w) * sub_h /
                         (static_cast<double>(frame_w) * frame_h);
    const long scaled = std::lround(frame_count * ratio);
    const long sub_pixels = static_cast<long>(sub_w) * sub_h;
    const long lo = std::min<long>(16, sub_pixels);
    const long hi = std::max<long>(sub_pixels / 4, lo);
    return static_cast<int>(std::clamp<long>(scaled, lo, hi));
}

} // namespace spx
