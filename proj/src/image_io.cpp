#include "spxtrack/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>

#include "spxtrack/error.hpp"

namespace spx {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

int pnm_next_token(std::istream& in) {
    // Skips whitespace and '#' comments, returns a nonnegative integer.
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            in.unget();
            int value = -1;
            in >> value;
            return value;
        }
    }
    return -1;
}

struct PnmHeader {
    int magic = 0; // 5 or 6
    int width = 0;
    int height = 0;
    int maxval = 0;
};

PnmHeader read_pnm_header(std::istream& in, const std::filesystem::path& path) {
    char p, m;
    in.get(p);
    in.get(m);
    if (p != 'P' || (m != '5' && m != '6'))
        throw ParseError("not a binary PGM/PPM file: " + path.string());
    PnmHeader h;
    h.magic = m - '0';
    h.width = pnm_next_token(in);
    h.height = pnm_next_token(in);
    h.maxval = pnm_next_token(in);
    if (h.width <= 0 || h.height <= 0 || h.maxval != 255)
        throw ParseError("unsupported PNM header in " + path.string());
    in.get(); // single whitespace before raster
    return h;
}

bool has_png_signature(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    unsigned char sig[8] = {};
    in.read(reinterpret_cast<char*>(sig), 8);
    return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 0; // 1 or 3, 8-bit
    std::vector<std::uint8_t> data;
};

PngImage read_png_file(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp)
        throw MissingInputError("cannot open " + path.string());

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError("failed to decode PNG " + path.string());
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_packing(png);
    const int color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);

    PngImage img;
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.channels = static_cast<int>(png_get_channels(png, info));
    if (img.channels != 1 && img.channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError("unsupported PNG channel count in " + path.string());
    }
    img.data.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = img.data.data() +
                  static_cast<std::size_t>(y) * img.width * img.channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png_impl(const std::filesystem::path& path, const std::uint8_t* data,
                    int width, int height, int channels, int bit_depth) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp)
        throw Error("cannot write " + path.string());
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("failed to encode PNG " + path.string());
    }
    png_init_io(png, fp.get());
    const int color =
        channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
    png_set_IHDR(png, info, width, height, bit_depth, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16)
        png_set_swap(png); // little-endian in-memory rows

    const std::size_t stride =
        static_cast<std::size_t>(width) * channels * (bit_depth / 8);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(data + y * stride);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

Frame read_image(const std::filesystem::path& path, int index) {
    if (!std::filesystem::exists(path))
        throw MissingInputError("no such image: " + path.string());
    if (has_png_signature(path)) {
        PngImage img = read_png_file(path);
        std::vector<std::uint8_t> rgb(static_cast<std::size_t>(img.width) *
                                      img.height * 3);
        if (img.channels == 3) {
            rgb = std::move(img.data);
        } else {
            for (std::size_t i = 0; i < img.data.size(); ++i)
                rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = img.data[i];
        }
        return Frame(img.width, img.height, std::move(rgb), index);
    }

    std::ifstream in(path, std::ios::binary);
    const PnmHeader h = read_pnm_header(in, path);
    const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    std::vector<std::uint8_t> rgb(n * 3);
    if (h.magic == 6) {
        in.read(reinterpret_cast<char*>(rgb.data()), rgb.size());
        if (static_cast<std::size_t>(in.gcount()) != rgb.size())
            throw ParseError("truncated PPM raster in " + path.string());
    } else {
        std::vector<std::uint8_t> gray(n);
        in.read(reinterpret_cast<char*>(gray.data()), gray.size());
        if (static_cast<std::size_t>(in.gcount()) != gray.size())
            throw ParseError("truncated PGM raster in " + path.string());
        for (std::size_t i = 0; i < n; ++i)
            rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = gray[i];
    }
    return Frame(h.width, h.height, std::move(rgb), index);
}

GrayImage read_gray_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw MissingInputError("no such image: " + path.string());
    GrayImage out;
    if (has_png_signature(path)) {
        PngImage img = read_png_file(path);
        out.width = img.width;
        out.height = img.height;
        if (img.channels == 1) {
            out.pixels = std::move(img.data);
        } else {
            out.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
            for (std::size_t i = 0; i < out.pixels.size(); ++i)
                out.pixels[i] = img.data[3 * i]; // R plane of an RGB-saved mosaic
        }
        return out;
    }
    std::ifstream in(path, std::ios::binary);
    const PnmHeader h = read_pnm_header(in, path);
    if (h.magic != 5)
        throw ParseError("expected grayscale image: " + path.string());
    out.width = h.width;
    out.height = h.height;
    out.pixels.resize(static_cast<std::size_t>(h.width) * h.height);
    in.read(reinterpret_cast<char*>(out.pixels.data()), out.pixels.size());
    if (static_cast<std::size_t>(in.gcount()) != out.pixels.size())
        throw ParseError("truncated PGM raster in " + path.string());
    return out;
}

void write_ppm(const std::filesystem::path& path, const Frame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << "P6\n" << frame.width() << " " << frame.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.rgb().data()),
              static_cast<std::streamsize>(frame.rgb().size()));
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
    write_png_impl(path, frame.rgb().data(), frame.width(), frame.height(), 3, 8);
}

void write_png_gray16(const std::filesystem::path& path,
                      const std::vector<std::uint16_t>& pixels, int width,
                      int height) {
    if (pixels.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("write_png_gray16: size mismatch");
    write_png_impl(path, reinterpret_cast<const std::uint8_t*>(pixels.data()),
                   width, height, 1, 16);
}

std::vector<std::filesystem::path>
list_camera_sequence(const std::filesystem::path& dir, int cam_id) {
    if (!std::filesystem::is_directory(dir))
        throw MissingInputError("no such directory: " + dir.string());
    const std::string prefix = "cam" + std::to_string(cam_id) + "_";
    std::map<long, std::filesystem::path> by_number;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        const std::string stem = entry.path().stem().string();
        if (stem.rfind(prefix, 0) != 0)
            continue;
        const std::string digits = stem.substr(prefix.size());
        if (digits.empty() ||
            !std::all_of(digits.begin(), digits.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            continue;
        by_number.emplace(std::stol(digits), entry.path());
    }
    std::vector<std::filesystem::path> out;
    out.reserve(by_number.size());
    for (auto& [n, p] : by_number)
        out.push_back(std::move(p));
    return out;
}

} // namespace spx
