#include <doctest.h>

#include <cmath>
#include <random>

#include "spxtrack/matcher.hpp"

using namespace spx;

namespace {

// Exhaustive scorer written independently: recompute column min/max, scale,
// weight, scan every candidate with the declared tie rules.
int brute_force_select(const std::vector<FeatureVector>& features,
                       const Weights& weights) {
    const std::size_t n = features.size();
    double lo[7], hi[7];
    for (int k = 0; k < 7; ++k) {
        lo[k] = features[0].f[k];
        hi[k] = features[0].f[k];
        for (std::size_t i = 1; i < n; ++i) {
            lo[k] = std::min(lo[k], features[i].f[k]);
            hi[k] = std::max(hi[k], features[i].f[k]);
        }
    }
    int best = -1;
    double best_score = 0, best_f7 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double score = 0;
        double n7 = 0;
        for (int k = 0; k < 7; ++k) {
            const double range = hi[k] - lo[k];
            const double scaled = range > 0 ? (features[i].f[k] - lo[k]) / range : 0.0;
            score += weights.w[k] * scaled;
            if (k == 6)
                n7 = scaled;
        }
        if (best < 0 || score < best_score ||
            (score == best_score && n7 < best_f7)) {
            best = static_cast<int>(i);
            best_score = score;
            best_f7 = n7;
        }
    }
    return best;
}

Superpixel sp_with(double sat, double hue, double gray, double cx, double cy) {
    Superpixel sp;
    sp.mean_sat = sat;
    sp.mean_hue = hue;
    sp.mean_gray = gray;
    sp.cx = cx;
    sp.cy = cy;
    sp.pixel_count = 10;
    return sp;
}

} // namespace

TEST_CASE("circular hue distance") {
    CHECK(circular_hue_distance(0.3, 0.3) == 0);
    CHECK(circular_hue_distance(0.95, 0.05) == doctest::Approx(0.2));
    CHECK(circular_hue_distance(0.0, 0.5) == doctest::Approx(1.0));
    CHECK(circular_hue_distance(0.25, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("extract_features: perfect match zeroes the mismatch") {
    const MarkerAppearance prev{0.5, 0.2, 0.4};
    const MarkerAppearance init{0.6, 0.25, 0.35};
    const Superpixel sp = sp_with(0.5, 0.2, 0.4, 12.0, 34.0);
    const FeatureVector fv = extract_features(sp, prev, init, Point2{12.0, 34.0});
    CHECK(fv.f[0] == 0);
    CHECK(fv.f[2] == 0);
    CHECK(fv.f[4] == 0);
    CHECK(fv.f[6] == 0);
    CHECK(fv.f[1] == doctest::Approx(0.1));
    CHECK(fv.f[5] == doctest::Approx(0.05));
}

TEST_CASE("extract_features: centroid distance and hue wraparound") {
    const MarkerAppearance prev{0.5, 0.95, 0.4};
    const MarkerAppearance init = prev;
    const Superpixel sp = sp_with(0.5, 0.05, 0.4, 30.0, 40.0);
    const FeatureVector fv = extract_features(sp, prev, init, Point2{0.0, 0.0});
    CHECK(fv.f[6] == doctest::Approx(50.0));
    // 0.95 vs 0.05 wraps to distance 0.1, scaled x2 on [0,1].
    CHECK(fv.f[2] == doctest::Approx(0.2));
    CHECK(fv.f[2] < 0.9);
}

TEST_CASE("normalize: linear scaling and degenerate columns") {
    std::vector<FeatureVector> fvs(3);
    for (auto& fv : fvs)
        fv.f = {1, 1, 1, 1, 1, 1, 0};
    fvs[0].f[6] = 0;
    fvs[1].f[6] = 25;
    fvs[2].f[6] = 50;
    const auto n = normalize_features(fvs);
    CHECK(n[0][6] == doctest::Approx(0.0));
    CHECK(n[1][6] == doctest::Approx(0.5));
    CHECK(n[2][6] == doctest::Approx(1.0));
    // Degenerate columns (constant) map to zero.
    for (int k = 0; k < 6; ++k)
        for (int i = 0; i < 3; ++i)
            CHECK(n[i][k] == 0.0);

    const std::vector<FeatureVector> lone(1, fvs[0]);
    const auto single = normalize_features(lone);
    for (int k = 0; k < 7; ++k)
        CHECK(single[0][k] == 0.0);

    CHECK_THROWS_AS(normalize_features(std::vector<FeatureVector>{}),
                    std::invalid_argument);
}

TEST_CASE("normalize matches a column-wise oracle on random matrices") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> val(0.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<FeatureVector> fvs(10);
        for (auto& fv : fvs)
            for (auto& x : fv.f)
                x = val(rng);
        const auto got = normalize_features(fvs);
        for (int k = 0; k < 7; ++k) {
            double lo = fvs[0].f[k], hi = fvs[0].f[k];
            for (const auto& fv : fvs) {
                lo = std::min(lo, fv.f[k]);
                hi = std::max(hi, fv.f[k]);
            }
            for (int i = 0; i < 10; ++i) {
                const double expect = hi > lo ? (fvs[i].f[k] - lo) / (hi - lo) : 0.0;
                CHECK(got[i][k] == doctest::Approx(expect).epsilon(1e-12));
                CHECK(got[i][k] >= 0.0);
                CHECK(got[i][k] <= 1.0);
            }
        }
    }
}

TEST_CASE("select: dominance and tie rules") {
    Weights w;
    std::vector<FeatureVector> fvs(2);
    fvs[0].f = {0, 0, 0, 0, 0, 0, 0};
    fvs[1].f = {1, 1, 1, 1, 1, 1, 1};
    const Selection sel = select_best(fvs, w);
    CHECK(sel.index == 0);
    CHECK(sel.score == doctest::Approx(0.0));

    const std::vector<FeatureVector> lone(1, fvs[1]);
    CHECK(select_best(lone, w).index == 0);
}

TEST_CASE("select agrees with the exhaustive scorer on random candidate sets") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    std::uniform_real_distribution<double> px(0.0, 120.0);
    Weights w;
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 50);
        std::vector<FeatureVector> fvs(n);
        for (auto& fv : fvs) {
            for (int k = 0; k < 6; ++k)
                fv.f[k] = val(rng);
            fv.f[6] = px(rng);
        }
        CHECK(select_best(fvs, w).index == brute_force_select(fvs, w));
    }
}

TEST_CASE("selection is invariant under increasing affine maps of a raw column") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    std::uniform_real_distribution<double> gain(0.1, 9.0);
    std::uniform_real_distribution<double> offset(-3.0, 3.0);
    Weights w;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 30);
        std::vector<FeatureVector> fvs(n);
        for (auto& fv : fvs)
            for (auto& x : fv.f)
                x = val(rng);
        const int before = select_best(fvs, w).index;

        const int column = static_cast<int>(rng() % 7);
        const double a = gain(rng);
        const double b = offset(rng);
        for (auto& fv : fvs)
            fv.f[column] = a * fv.f[column] + b;
        CHECK(select_best(fvs, w).index == before);
    }
}

TEST_CASE("zero-mismatch candidate always wins when unique") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> val(0.05, 1.0);
    Weights w;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 20);
        std::vector<FeatureVector> fvs(n);
        for (auto& fv : fvs)
            for (auto& x : fv.f)
                x = val(rng);
        const int zero_at = static_cast<int>(rng() % n);
        fvs[zero_at].f = {0, 0, 0, 0, 0, 0, 0};
        CHECK(select_best(fvs, w).index == zero_at);
    }
}

TEST_CASE("gate accepts inclusively at the thresholds") {
    MatchGate gate;
    FeatureVector fv;
    fv.f = {0, 0, 0, 0, 0, 0, 0};
    CHECK(gate_accepts(fv, gate));
    fv.f[6] = 50.0;
    CHECK(gate_accepts(fv, gate)); // boundary included
    fv.f[6] = 80.0;
    CHECK_FALSE(gate_accepts(fv, gate));
    fv.f[6] = 0.0;
    fv.f[0] = 0.35;
    CHECK(gate_accepts(fv, gate));
    fv.f[0] = 0.351;
    CHECK_FALSE(gate_accepts(fv, gate));
}

TEST_CASE("nslic: adopted count formula and clamping") {
    // Consistency with the original toe setting: NP=287 at 2048x700.
    const int toe = nslic(287, 2048, 700);
    CHECK(std::abs(toe - 10000) <= 100); // within 1%

    CHECK(nslic(2 * 2048 * 700, 2048, 700) == 16); // clamp floor
    CHECK(nslic(1, 64, 64) == 64 * 64 / 4);        // clamp ceiling
    CHECK_THROWS_AS(nslic(0, 100, 100), std::invalid_argument);
}

TEST_CASE("scale_superpixel_count keeps the per-area density") {
    // 10000 superpixels on 2048x700 maps to ~70 on a 100x100 window.
    const int roi = scale_superpixel_count(10000, 2048, 700, 100, 100);
    CHECK(roi >= 60);
    CHECK(roi <= 80);
    CHECK(scale_superpixel_count(16, 2048, 700, 100, 100) >= 16);
}
