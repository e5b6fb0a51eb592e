#include "spxtrack/slic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace spx {

double color_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double d0 = a[0] - b[0];
    const double d1 = a[1] - b[1];
    const double d2 = a[2] - b[2];
    return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

double spatial_distance(double x0, double y0, double x1, double y1) {
    const double dx = x1 - x0;
    const double dy = y1 - y0;
    return std::sqrt(dx * dx + dy * dy);
}

double combined_distance(double dc, double dp, double nc, double np) {
    if (nc <= 0 || np <= 0)
        throw std::invalid_argument("combined_distance: normalizers must be positive");
    const double c = dc / nc;
    const double p = dp / np;
    return std::sqrt(c * c + p * p);
}

namespace {

constexpr int kRowsPerBlock = 16;

struct Cluster {
    double x = 0, y = 0;
    double c0 = 0, c1 = 0, c2 = 0;
};

struct BlockAcc {
    std::vector<double> sums; // 6 per label: x, y, c0, c1, c2, count
    double objective = 0;
};

// Feature planes for the clustering distance; RGB as written in the color
// distance, or HSV scaled to the same 0..255 range when the channel-space
// switch is flipped.
std::vector<std::array<float, 3>> make_features(const Frame& img,
                                                SlicParams::ColorSpace space) {
    const std::size_t n = img.pixel_count();
    std::vector<std::array<float, 3>> feat(n);
    if (space == SlicParams::ColorSpace::Rgb) {
        const auto& rgb = img.rgb();
        for (std::size_t i = 0; i < n; ++i)
            feat[i] = {static_cast<float>(rgb[3 * i]),
                       static_cast<float>(rgb[3 * i + 1]),
                       static_cast<float>(rgb[3 * i + 2])};
    } else {
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                feat[static_cast<std::size_t>(y) * img.width() + x] = {
                    img.hue(x, y) * 255.0f, img.sat(x, y) * 255.0f,
                    img.val(x, y) * 255.0f};
    }
    return feat;
}

double gradient_at(const std::vector<std::array<float, 3>>& feat, int w, int h,
                   int x, int y) {
    const auto px = [&](int xx, int yy) -> const std::array<float, 3>& {
        xx = std::clamp(xx, 0, w - 1);
        yy = std::clamp(yy, 0, h - 1);
        return feat[static_cast<std::size_t>(yy) * w + xx];
    };
    const auto& xp = px(x + 1, y);
    const auto& xm = px(x - 1, y);
    const auto& yp = px(x, y + 1);
    const auto& ym = px(x, y - 1);
    double g = 0;
    for (int c = 0; c < 3; ++c) {
        const double dx = static_cast<double>(xp[c]) - xm[c];
        const double dy = static_cast<double>(yp[c]) - ym[c];
        g += dx * dx + dy * dy;
    }
    return g;
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) {
        for (int i = 0; i < n; ++i)
            parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
};

// Connected components per label, then merge components smaller than
// min_region into their largest adjacent component. Labels come out compact
// in scan order.
void enforce_connectivity(std::vector<std::int32_t>& labels, int w, int h,
                          int min_region, int& n_labels_out) {
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<std::int32_t> comp(n, -1);
    std::vector<long> comp_size;
    std::vector<std::vector<int>> comp_adj;
    std::vector<std::size_t> stack;

    const int dx4[4] = {-1, 1, 0, 0};
    const int dy4[4] = {0, 0, -1, 1};

    for (std::size_t start = 0; start < n; ++start) {
        if (comp[start] >= 0)
            continue;
        const int id = static_cast<int>(comp_size.size());
        comp_size.push_back(0);
        comp_adj.emplace_back();
        comp[start] = id;
        stack.assign(1, start);
        long size = 0;
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++size;
            const int px = static_cast<int>(p % w);
            const int py = static_cast<int>(p / w);
            for (int k = 0; k < 4; ++k) {
                const int qx = px + dx4[k];
                const int qy = py + dy4[k];
                if (qx < 0 || qx >= w || qy < 0 || qy >= h)
                    continue;
                const std::size_t q = static_cast<std::size_t>(qy) * w + qx;
                if (labels[q] == labels[p]) {
                    if (comp[q] < 0) {
                        comp[q] = id;
                        stack.push_back(q);
                    }
                } else if (comp[q] >= 0 && comp[q] != id) {
                    comp_adj[id].push_back(comp[q]);
                    comp_adj[comp[q]].push_back(id);
                }
            }
        }
        comp_size[id] = size;
    }

    const int n_comps = static_cast<int>(comp_size.size());
    DisjointSet ds(n_comps);
    std::vector<long> size_of_root = comp_size;

    bool merged = true;
    while (merged) {
        merged = false;
        for (int c = 0; c < n_comps; ++c) {
            if (ds.find(c) != c || size_of_root[c] >= min_region)
                continue;
            // Largest adjacent component; ties to the lowest root id.
            int best = -1;
            long best_size = -1;
            for (int a : comp_adj[c]) {
                const int r = ds.find(a);
                if (r == c)
                    continue;
                if (size_of_root[r] > best_size ||
                    (size_of_root[r] == best_size && r < best)) {
                    best = r;
                    best_size = size_of_root[r];
                }
            }
            if (best < 0)
                continue;
            ds.parent[c] = best;
            size_of_root[best] += size_of_root[c];
            auto& dst = comp_adj[best];
            dst.insert(dst.end(), comp_adj[c].begin(), comp_adj[c].end());
            merged = true;
        }
    }

    std::vector<std::int32_t> final_label(n_comps, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int r = ds.find(comp[i]);
        if (final_label[r] < 0)
            final_label[r] = next++;
        labels[i] = final_label[r];
    }
    n_labels_out = next;
}

} // namespace

Segmentation slic_segment(const Frame& image, const SlicParams& params,
                          std::vector<double>* objective_out) {
    if (image.empty())
        throw std::invalid_argument("slic_segment: empty image");
    const int w = image.width();
    const int h = image.height();
    const long total = static_cast<long>(w) * h;
    if (params.n_superpixels < 1 || params.n_superpixels > total)
        throw std::invalid_argument("slic_segment: n_superpixels out of range");
    if (params.compactness <= 0)
        throw std::invalid_argument("slic_segment: compactness must be positive");
    if (params.max_iters < 1)
        throw std::invalid_argument("slic_segment: max_iters must be at least 1");
    if (objective_out)
        objective_out->clear();

    const auto feat = make_features(image, params.color_space);

    // Initial grid interval; doubles as the spatial normalizer Np.
    const double S = std::sqrt(static_cast<double>(total) / params.n_superpixels);
    const double nc = params.compactness;

    // Seed grid: nx*ny as close to the request as possible, preferring cells
    // close to square; exact squareness ties split the wider axis first.
    const double ideal_nx =
        std::sqrt(params.n_superpixels * static_cast<double>(w) / h);
    int best_nx = 1, best_ny = 1;
    long best_err = std::numeric_limits<long>::max();
    double best_skew = std::numeric_limits<double>::infinity();
    for (int nx = std::max(1, static_cast<int>(ideal_nx) - 2);
         nx <= static_cast<int>(ideal_nx) + 3; ++nx) {
        if (nx < 1 || nx > w)
            continue;
        const double per_col = static_cast<double>(params.n_superpixels) / nx;
        for (long nyc : {static_cast<long>(std::floor(per_col)),
                         static_cast<long>(std::ceil(per_col))}) {
            const int ny = static_cast<int>(std::clamp<long>(nyc, 1, h));
            const long err = std::labs(static_cast<long>(nx) * ny -
                                       static_cast<long>(params.n_superpixels));
            const double skew = std::abs(std::log(
                (static_cast<double>(w) / nx) / (static_cast<double>(h) / ny)));
            const bool tie_pref =
                skew < best_skew - 1e-12 ||
                (std::abs(skew - best_skew) <= 1e-12 &&
                 (w >= h ? nx > best_nx : ny > best_ny));
            if (err < best_err || (err == best_err && tie_pref)) {
                best_err = err;
                best_nx = nx;
                best_ny = ny;
                best_skew = skew;
            }
        }
    }

    std::vector<Cluster> clusters;
    for (int j = 0; j < best_ny; ++j) {
        for (int i = 0; i < best_nx; ++i) {
            const double xc = (i + 0.5) * static_cast<double>(w) / best_nx;
            const double yc = (j + 0.5) * static_cast<double>(h) / best_ny;
            int x = std::min(static_cast<int>(xc), w - 1);
            int y = std::min(static_cast<int>(yc), h - 1);
            // Move off edges: lowest-gradient position in the 3x3 neighborhood.
            double best_g = gradient_at(feat, w, h, x, y);
            int bx = x, by = y;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int qx = std::clamp(x + dx, 0, w - 1);
                    const int qy = std::clamp(y + dy, 0, h - 1);
                    const double g = gradient_at(feat, w, h, qx, qy);
                    if (g < best_g) {
                        best_g = g;
                        bx = qx;
                        by = qy;
                    }
                }
            }
            const auto& f = feat[static_cast<std::size_t>(by) * w + bx];
            clusters.push_back({static_cast<double>(bx), static_cast<double>(by),
                                f[0], f[1], f[2]});
        }
    }
    const int k = static_cast<int>(clusters.size());

    std::vector<std::int32_t> labels(total, -1);
    std::vector<std::int32_t> next_labels(total, -1);

    const int n_blocks = (h + kRowsPerBlock - 1) / kRowsPerBlock;
    int n_workers = params.n_workers > 0
                        ? params.n_workers
                        : std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::clamp(n_workers, 1, n_blocks);
    // Thread spawns cost more than the assignment pass on small images; the
    // block-merge order keeps results identical either way.
    if (params.n_workers <= 0 && total < 64 * 1024)
        n_workers = 1;

    // Cluster lookup grid with cell size S. Every pixel of a cell shares the
    // same 3x3 cell neighborhood, so the merged candidate list is built once
    // per cell per iteration; the 2S window test stays per pixel.
    const int gw = static_cast<int>(w / S) + 2;
    const int gh = static_cast<int>(h / S) + 2;
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(gw) * gh);
    std::vector<std::vector<int>> cell_candidates(buckets.size());

    std::vector<BlockAcc> blocks(n_blocks);
    for (auto& blk : blocks)
        blk.sums.assign(static_cast<std::size_t>(k) * 6, 0.0);

    const auto assign_block = [&](int block) {
        BlockAcc& acc = blocks[block];
        std::fill(acc.sums.begin(), acc.sums.end(), 0.0);
        acc.objective = 0;
        const int y0 = block * kRowsPerBlock;
        const int y1 = std::min(h, y0 + kRowsPerBlock);
        for (int y = y0; y < y1; ++y) {
            const int cy = std::min(static_cast<int>(y / S), gh - 1);
            for (int x = 0; x < w; ++x) {
                const std::size_t pi = static_cast<std::size_t>(y) * w + x;
                const auto& f = feat[pi];
                const int cx = std::min(static_cast<int>(x / S), gw - 1);
                double best_d = std::numeric_limits<double>::infinity();
                int best_label = -1;
                const auto consider = [&](int ci) {
                    const Cluster& c = clusters[ci];
                    const double dxs = c.x - x;
                    const double dys = c.y - y;
                    const double d0 = c.c0 - f[0];
                    const double d1 = c.c1 - f[1];
                    const double d2 = c.c2 - f[2];
                    const double dc2 = d0 * d0 + d1 * d1 + d2 * d2;
                    const double dp2 = dxs * dxs + dys * dys;
                    const double d = dc2 / (nc * nc) + dp2 / (S * S);
                    if (d < best_d || (d == best_d && ci < best_label)) {
                        best_d = d;
                        best_label = ci;
                    }
                };
                for (int ci : cell_candidates[static_cast<std::size_t>(cy) * gw + cx]) {
                    const Cluster& c = clusters[ci];
                    if (std::abs(c.x - x) <= S && std::abs(c.y - y) <= S)
                        consider(ci);
                }
                // The previous assignment stays a candidate even when its
                // center drifted out of window range; keeps the energy
                // non-increasing.
                if (labels[pi] >= 0)
                    consider(labels[pi]);
                if (best_label < 0) {
                    // No window covers this pixel; fall back to the nearest
                    // center spatially.
                    double best_sp = std::numeric_limits<double>::infinity();
                    for (int ci = 0; ci < k; ++ci) {
                        const double dxs = clusters[ci].x - x;
                        const double dys = clusters[ci].y - y;
                        const double d = dxs * dxs + dys * dys;
                        if (d < best_sp) {
                            best_sp = d;
                            best_label = ci;
                        }
                    }
                    const Cluster& c = clusters[best_label];
                    const double d0 = c.c0 - f[0];
                    const double d1 = c.c1 - f[1];
                    const double d2 = c.c2 - f[2];
                    best_d = (d0 * d0 + d1 * d1 + d2 * d2) / (nc * nc) +
                             best_sp / (S * S);
                }
                next_labels[pi] = best_label;
                acc.objective += best_d;
                double* s = &acc.sums[static_cast<std::size_t>(best_label) * 6];
                s[0] += x;
                s[1] += y;
                s[2] += f[0];
                s[3] += f[1];
                s[4] += f[2];
                s[5] += 1;
            }
        }
    };

    for (int iter = 0; iter < params.max_iters; ++iter) {
        for (auto& b : buckets)
            b.clear();
        for (int ci = 0; ci < k; ++ci) {
            const int bx = std::clamp(static_cast<int>(clusters[ci].x / S), 0, gw - 1);
            const int by = std::clamp(static_cast<int>(clusters[ci].y / S), 0, gh - 1);
            buckets[static_cast<std::size_t>(by) * gw + bx].push_back(ci);
        }
        for (int cy = 0; cy < gh; ++cy) {
            for (int cx = 0; cx < gw; ++cx) {
                auto& merged = cell_candidates[static_cast<std::size_t>(cy) * gw + cx];
                merged.clear();
                for (int by = std::max(0, cy - 1); by <= std::min(gh - 1, cy + 1); ++by)
                    for (int bx = std::max(0, cx - 1); bx <= std::min(gw - 1, cx + 1); ++bx)
                        for (int ci : buckets[static_cast<std::size_t>(by) * gw + bx])
                            merged.push_back(ci);
            }
        }

        if (n_workers == 1) {
            for (int b = 0; b < n_blocks; ++b)
                assign_block(b);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(n_workers);
            for (int t = 0; t < n_workers; ++t) {
                pool.emplace_back([&, t]() {
                    for (int b = t; b < n_blocks; b += n_workers)
                        assign_block(b);
                });
            }
            for (auto& th : pool)
                th.join();
        }

        labels.swap(next_labels);

        // Merge block accumulators in block order so sums do not depend on
        // the thread layout.
        std::vector<double> sums(static_cast<std::size_t>(k) * 6, 0.0);
        double objective = 0;
        for (const auto& blk : blocks) {
            for (std::size_t i = 0; i < sums.size(); ++i)
                sums[i] += blk.sums[i];
            objective += blk.objective;
        }
        if (objective_out)
            objective_out->push_back(objective);

        for (int ci = 0; ci < k; ++ci) {
            const double* s = &sums[static_cast<std::size_t>(ci) * 6];
            if (s[5] > 0) {
                clusters[ci].x = s[0] / s[5];
                clusters[ci].y = s[1] / s[5];
                clusters[ci].c0 = s[2] / s[5];
                clusters[ci].c1 = s[3] / s[5];
                clusters[ci].c2 = s[4] / s[5];
            }
        }
    }

    Segmentation seg;
    seg.width = w;
    seg.height = h;
    seg.labels = std::move(labels);
    const int min_region =
        params.min_region > 0
            ? params.min_region
            : std::max(1, static_cast<int>(S * S / 16.0));
    enforce_connectivity(seg.labels, w, h, min_region, seg.n_labels);
    return seg;
}

std::vector<Superpixel> superpixel_stats(const Segmentation& seg, const Frame& frame) {
    if (seg.width != frame.width() || seg.height != frame.height())
        throw std::invalid_argument("superpixel_stats: segmentation/frame size mismatch");
    struct Acc {
        long n = 0;
        double x = 0, y = 0;
        double sat = 0, gray = 0;
        double hue_cos = 0, hue_sin = 0;
        double r = 0, g = 0, b = 0;
    };
    std::vector<Acc> acc(seg.n_labels);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int y = 0; y < seg.height; ++y) {
        for (int x = 0; x < seg.width; ++x) {
            Acc& a = acc[seg.label_at(x, y)];
            a.n += 1;
            a.x += x;
            a.y += y;
            a.sat += frame.sat(x, y);
            a.gray += frame.gray(x, y);
            const double angle = two_pi * frame.hue(x, y);
            a.hue_cos += std::cos(angle);
            a.hue_sin += std::sin(angle);
            a.r += frame.r(x, y);
            a.g += frame.g(x, y);
            a.b += frame.b(x, y);
        }
    }
    std::vector<Superpixel> out(seg.n_labels);
    for (int l = 0; l < seg.n_labels; ++l) {
        const Acc& a = acc[l];
        Superpixel& sp = out[l];
        sp.label = l;
        sp.pixel_count = static_cast<int>(a.n);
        if (a.n == 0)
            continue;
        sp.cx = a.x / a.n;
        sp.cy = a.y / a.n;
        sp.mean_sat = a.sat / a.n;
        sp.mean_gray = a.gray / a.n;
        double hue = std::atan2(a.hue_sin, a.hue_cos) / two_pi;
        if (hue < 0)
            hue += 1.0;
        if (hue >= 1.0)
            hue -= 1.0;
        sp.mean_hue = hue;
        sp.mean_red = a.r / a.n;
        sp.mean_green = a.g / a.n;
        sp.mean_blue = a.b / a.n;
    }
    return out;
}

std::vector<std::uint16_t> labels_to_gray16(const Segmentation& seg) {
    std::vector<std::uint16_t> out(seg.labels.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint16_t>(std::min<std::int32_t>(seg.labels[i], 65535));
    return out;
}

Frame overlay_boundaries(const Frame& frame, const Segmentation& seg) {
    Frame out = frame;
    for (int y = 0; y < seg.height; ++y) {
        for (int x = 0; x < seg.width; ++x) {
            const bool edge =
                (x + 1 < seg.width && seg.label_at(x, y) != seg.label_at(x + 1, y)) ||
                (y + 1 < seg.height && seg.label_at(x, y) != seg.label_at(x, y + 1));
            if (edge)
                out.set_rgb(x, y, 255, 0, 0);
        }
    }
    return out;
}

} // namespace spx
