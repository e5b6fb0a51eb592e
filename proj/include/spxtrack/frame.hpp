#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

namespace spx {

struct Hsv {
    double h = 0; // hue on [0,1), wraps
    double s = 0; // saturation on [0,1]
    double v = 0; // value on [0,1]
};

// RGB in [0,255] -> HSV with all channels on [0,1]. Gray-axis inputs give s=0.
Hsv rgb_to_hsv(double r, double g, double b);

// Luma grayscale with 0.299/0.587/0.114 weights, normalized to [0,1].
double to_gray(double r, double g, double b);

// One camera image: 8-bit interleaved RGB plus lazily derived H/S/V/gray
// planes. Immutable after construction except for the derived-plane cache,
// which is computed once under a lock, so frames can be shared across
// workers.
class Frame {
public:
    Frame() = default;
    Frame(int width, int height, int index = 0);
    Frame(int width, int height, std::vector<std::uint8_t> rgb, int index = 0);

    Frame(const Frame& other);
    Frame& operator=(const Frame& other);
    Frame(Frame&&) noexcept = default;
    Frame& operator=(Frame&&) noexcept = default;

    int width() const { return width_; }
    int height() const { return height_; }
    int index() const { return index_; }
    bool empty() const { return width_ == 0 || height_ == 0; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }

    std::uint8_t r(int x, int y) const { return rgb_[3 * at(x, y) + 0]; }
    std::uint8_t g(int x, int y) const { return rgb_[3 * at(x, y) + 1]; }
    std::uint8_t b(int x, int y) const { return rgb_[3 * at(x, y) + 2]; }
    void set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    const std::vector<std::uint8_t>& rgb() const { return rgb_; }

    // Derived planes, on [0,1]; computed from RGB on first access.
    float hue(int x, int y) const;
    float sat(int x, int y) const;
    float val(int x, int y) const;
    float gray(int x, int y) const;

private:
    std::size_t at(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }
    void ensure_derived() const;

    int width_ = 0;
    int height_ = 0;
    int index_ = 0;
    std::vector<std::uint8_t> rgb_;

    struct Derived {
        std::vector<float> h, s, v, g;
    };
    mutable std::unique_ptr<Derived> derived_;
    mutable std::mutex derived_mutex_;
};

// Axis-aligned window inside a frame.
struct Roi {
    int x0 = 0;
    int y0 = 0;
    int w = 0;
    int h = 0;
};

// The w x h window centered on (cu,cv), shifted inward so it lies fully
// inside a width x height frame. Throws std::invalid_argument when the
// window cannot fit.
Roi roi_around(int frame_w, int frame_h, double cu, double cv, int w, int h);

// Copies the ROI pixels into a standalone sub-image (frame index preserved).
Frame extract_roi(const Frame& frame, double cu, double cv, int w, int h,
                  Roi* roi_out = nullptr);

} // namespace spx
