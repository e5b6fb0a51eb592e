#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "spxtrack/error.hpp"
#include "spxtrack/image_io.hpp"
#include "spxtrack/tracker.hpp"

using namespace spx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "spxtrack_io_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Frame noise_frame(int w, int h, std::uint32_t seed) {
    std::mt19937 rng(seed);
    Frame f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            f.set_rgb(x, y, rng() % 256, rng() % 256, rng() % 256);
    return f;
}

} // namespace

TEST_CASE("ppm and png round trips are lossless for 8-bit RGB") {
    TempDir dir;
    const Frame f = noise_frame(37, 23, 4);
    write_ppm(dir.path / "a.ppm", f);
    write_png(dir.path / "a.png", f);
    const Frame back_ppm = read_image(dir.path / "a.ppm");
    const Frame back_png = read_image(dir.path / "a.png");
    CHECK(back_ppm.width() == 37);
    CHECK(back_ppm.height() == 23);
    CHECK(back_ppm.rgb() == f.rgb());
    CHECK(back_png.rgb() == f.rgb());
}

TEST_CASE("gray images load as single planes") {
    TempDir dir;
    std::vector<std::uint16_t> labels(16 * 8);
    for (std::size_t i = 0; i < labels.size(); ++i)
        labels[i] = static_cast<std::uint16_t>(i * 13);
    write_png_gray16(dir.path / "labels.png", labels, 16, 8);
    CHECK(fs::exists(dir.path / "labels.png"));

    // A PGM mosaic plane reads back byte for byte.
    std::ofstream pgm(dir.path / "plane.pgm", std::ios::binary);
    pgm << "P5\n6 4\n255\n";
    for (int i = 0; i < 24; ++i)
        pgm.put(static_cast<char>(i * 10));
    pgm.close();
    const GrayImage g = read_gray_image(dir.path / "plane.pgm");
    CHECK(g.width == 6);
    CHECK(g.height == 4);
    CHECK(g.pixels[7] == 70);
}

TEST_CASE("missing and malformed files raise typed errors") {
    TempDir dir;
    CHECK_THROWS_AS(read_image(dir.path / "nope.ppm"), MissingInputError);
    std::ofstream bad(dir.path / "bad.ppm", std::ios::binary);
    bad << "P6\n4 4\n255\n";
    bad.close(); // truncated raster
    CHECK_THROWS_AS(read_image(dir.path / "bad.ppm"), ParseError);
}

TEST_CASE("bayer sequences demosaic on ingestion") {
    TempDir dir;
    for (int n = 0; n < 3; ++n) {
        std::ofstream pgm(dir.path / ("cam0_00000" + std::to_string(n) + ".pgm"),
                          std::ios::binary);
        pgm << "P5\n8 6\n255\n";
        for (int i = 0; i < 48; ++i)
            pgm.put(static_cast<char>(90)); // constant mosaic
    }
    spx::DirectoryFrameSource src(dir.path, 0, spx::BayerPattern::RGGB);
    CHECK(src.frame_count() == 3);
    CHECK(src.width() == 8);
    CHECK(src.height() == 6);
    const spx::Frame f = src.frame(1);
    CHECK(f.index() == 1);
    CHECK(f.r(3, 3) == 90);
    CHECK(f.g(3, 3) == 90);
    CHECK(f.b(3, 3) == 90);
}

TEST_CASE("camera sequences list in frame order") {
    TempDir dir;
    const Frame f = noise_frame(8, 8, 9);
    write_ppm(dir.path / "cam0_000002.ppm", f);
    write_ppm(dir.path / "cam0_000000.ppm", f);
    write_ppm(dir.path / "cam0_000001.ppm", f);
    write_ppm(dir.path / "cam1_000000.ppm", f);
    write_ppm(dir.path / "notes.ppm", f);
    const auto seq = list_camera_sequence(dir.path, 0);
    REQUIRE(seq.size() == 3);
    CHECK(seq[0].filename() == "cam0_000000.ppm");
    CHECK(seq[1].filename() == "cam0_000001.ppm");
    CHECK(seq[2].filename() == "cam0_000002.ppm");
}
