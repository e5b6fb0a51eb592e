#include "spxtrack/frame.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spx {

Hsv rgb_to_hsv(double r, double g, double b) {
    const double rn = r / 255.0;
    const double gn = g / 255.0;
    const double bn = b / 255.0;
    const double mx = std::max({rn, gn, bn});
    const double mn = std::min({rn, gn, bn});
    const double delta = mx - mn;

    Hsv out;
    out.v = mx;
    out.s = mx > 0 ? delta / mx : 0.0;
    if (delta <= 0) {
        out.h = 0.0;
        return out;
    }
    double h;
    if (mx == rn)
        h = (gn - bn) / delta;
    else if (mx == gn)
        h = 2.0 + (bn - rn) / delta;
    else
        h = 4.0 + (rn - gn) / delta;
    h /= 6.0;
    if (h < 0)
        h += 1.0;
    if (h >= 1.0)
        h -= 1.0;
    out.h = h;
    return out;
}

double to_gray(double r, double g, double b) {
    return (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
}

Frame::Frame(int width, int height, int index)
    : width_(width), height_(height), index_(index) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("Frame: dimensions must be positive");
    rgb_.assign(pixel_count() * 3, 0);
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> rgb, int index)
    : width_(width), height_(height), index_(index), rgb_(std::move(rgb)) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("Frame: dimensions must be positive");
    if (rgb_.size() != pixel_count() * 3)
        throw std::invalid_argument("Frame: RGB buffer size does not match " +
                                    std::to_string(width) + "x" + std::to_string(height));
}

Frame::Frame(const Frame& other)
    : width_(other.width_), height_(other.height_), index_(other.index_),
      rgb_(other.rgb_) {}

Frame& Frame::operator=(const Frame& other) {
    if (this != &other) {
        width_ = other.width_;
        height_ = other.height_;
        index_ = other.index_;
        rgb_ = other.rgb_;
        derived_.reset();
    }
    return *this;
}

void Frame::set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const std::size_t i = 3 * at(x, y);
    rgb_[i + 0] = r;
    rgb_[i + 1] = g;
    rgb_[i + 2] = b;
    derived_.reset();
}

void Frame::ensure_derived() const {
    if (derived_)
        return;
    std::lock_guard<std::mutex> lock(derived_mutex_);
    if (derived_)
        return;
    auto d = std::make_unique<Derived>();
    const std::size_t n = pixel_count();
    d->h.resize(n);
    d->s.resize(n);
    d->v.resize(n);
    d->g.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = rgb_[3 * i + 0];
        const double g = rgb_[3 * i + 1];
        const double b = rgb_[3 * i + 2];
        const Hsv hsv = rgb_to_hsv(r, g, b);
        d->h[i] = static_cast<float>(hsv.h);
        d->s[i] = static_cast<float>(hsv.s);
        d->v[i] = static_cast<float>(hsv.v);
        d->g[i] = static_cast<float>(to_gray(r, g, b));
    }
    derived_ = std::move(d);
}

float Frame::hue(int x, int y) const {
    ensure_derived();
    return derived_->h[at(x, y)];
}

float Frame::sat(int x, int y) const {
    ensure_derived();
    return derived_->s[at(x, y)];
}

float Frame::val(int x, int y) const {
    ensure_derived();
    return derived_->v[at(x, y)];
}

float Frame::gray(int x, int y) const {
    ensure_derived();
    return derived_->g[at(x, y)];
}

Roi roi_around(int frame_w, int frame_h, double cu, double cv, int w, int h) {
    if (w < 1 || h < 1)
        throw std::invalid_argument("roi_around: extent must be at least 1x1");
    if (w > frame_w || h > frame_h)
        throw std::invalid_argument("roi_around: window larger than frame");
    if (!std::isfinite(cu) || !std::isfinite(cv))
        throw std::invalid_argument("roi_around: center must be finite");
    long x0 = std::lround(cu) - w / 2;
    long y0 = std::lround(cv) - h / 2;
    x0 = std::clamp<long>(x0, 0, frame_w - w);
    y0 = std::clamp<long>(y0, 0, frame_h - h);
    return Roi{static_cast<int>(x0), static_cast<int>(y0), w, h};
}

Frame extract_roi(const Frame& frame, double cu, double cv, int w, int h,
                  Roi* roi_out) {
    const Roi roi = roi_around(frame.width(), frame.height(), cu, cv, w, h);
    if (roi_out)
        *roi_out = roi;
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
    const auto& src = frame.rgb();
    for (int y = 0; y < h; ++y) {
        const std::size_t src_off =
            (static_cast<std::size_t>(roi.y0 + y) * frame.width() + roi.x0) * 3;
        std::copy_n(src.begin() + src_off, static_cast<std::size_t>(w) * 3,
                    rgb.begin() + static_cast<std::size_t>(y) * w * 3);
    }
    return Frame(w, h, std::move(rgb), frame.index());
}

} // namespace spx
