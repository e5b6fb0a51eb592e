#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "spxtrack/config.hpp"
#include "spxtrack/error.hpp"
#include "spxtrack/tracker.hpp"

using namespace spx;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& contents)
        : path(name) {
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("defaults are loaded and typed") {
    const Config cfg;
    CHECK(cfg.get_double("kalman.process_noise") == doctest::Approx(0.05));
    CHECK(cfg.get_double("kalman.measurement_noise") == doctest::Approx(0.5));
    CHECK(cfg.get_int("tracker.roi_w") == 100);
    CHECK(cfg.get_int("tracker.init_padding") == 100);
    CHECK(cfg.get_string("tracker.mode") == "3d");
    CHECK(cfg.get_double("eval.tol_px") == doctest::Approx(10.0));
    const auto w = cfg.get_doubles("match.weights");
    REQUIRE(w.size() == 7);
    CHECK(w[0] == 3);
    CHECK(w[1] == 1);
    CHECK(w[6] == 3);
}

TEST_CASE("config file parsing with comments and overrides") {
    TempFile file("cfg_test.conf", R"(# tracking setup
kalman.process_noise = 0.2   # higher drift
match.gate.max_jump_px = 40
slic.count.toe = 10000
slic.count.ankle = 10000
slic.count.knee = 7000
slic.count.hip = 3000
slic.count.asis = 3000
)");
    const Config cfg = Config::from_file(file.path);
    CHECK(cfg.get_double("kalman.process_noise") == doctest::Approx(0.2));
    CHECK(cfg.get_double("match.gate.max_jump_px") == doctest::Approx(40));
    // Untouched keys keep defaults.
    CHECK(cfg.get_double("kalman.measurement_noise") == doctest::Approx(0.5));

    const auto counts = cfg.marker_counts();
    REQUIRE(counts.size() == 5);
    CHECK(counts.at("toe") == 10000);
    CHECK(counts.at("ankle") == 10000);
    CHECK(counts.at("knee") == 7000);
    CHECK(counts.at("hip") == 3000);
    CHECK(counts.at("asis") == 3000);
}

TEST_CASE("unknown keys are rejected by name") {
    TempFile file("cfg_bad.conf", "kalman.procss_noise = 0.2\n");
    try {
        Config::from_file(file.path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("kalman.procss_noise") != std::string::npos);
    }
    Config cfg;
    CHECK_THROWS_AS(cfg.set("nonsense.key", "1"), ParseError);
}

TEST_CASE("tracker config binds the documented keys") {
    Config cfg;
    cfg.set("tracker.mode", "2d");
    cfg.set("match.weights", "1,2,3,4,5,6,7");
    cfg.set("slic.count.toe", "12345");
    const TrackerConfig tc = TrackerConfig::from_config(cfg);
    CHECK(tc.mode == TrackerConfig::Mode::TwoDBaseline);
    CHECK(tc.weights.w[3] == 4);
    CHECK(tc.marker_counts.at("toe") == 12345);
    CHECK(tc.gate.max_jump_px == doctest::Approx(50));
    CHECK(tc.kalman.process_noise == doctest::Approx(0.05));

    cfg.set("match.weights", "1,2,3");
    CHECK_THROWS_AS(TrackerConfig::from_config(cfg), ParseError);
}
