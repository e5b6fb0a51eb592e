#include <doctest.h>

#include <cmath>
#include <random>

#include "spxtrack/error.hpp"
#include "spxtrack/geometry.hpp"

using namespace spx;

namespace {

// Ground-truth camera for round trips; values chosen to keep denominators
// well away from zero over the sampled volume.
CameraModel fixture_camera(int id) {
    CameraModel cam;
    cam.id = id;
    if (id == 0)
        cam.coeffs = {3.1, 0.2, -0.4, 820.0, -0.1, 2.9, 0.5,  410.0,
                      1e-4, 2e-4, 5e-5};
    else
        cam.coeffs = {2.8, -0.3, 0.6, 640.0, 0.2, 3.2, -0.2, 380.0,
                      -2e-4, 1.5e-4, 8e-5};
    return cam;
}

// 25-ball calibration object: a 5x5 grid at alternating heights, like a
// block of posts of different lengths.
std::vector<Point3> calibration_balls() {
    std::vector<Point3> balls;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            balls.push_back(Point3{40.0 * i, 40.0 * j, 15.0 * ((i * 5 + j) % 4)});
    return balls;
}

} // namespace

TEST_CASE("project: orthographic selection and plain arithmetic") {
    CameraModel cam;
    cam.coeffs = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0};
    const Point2 p = project(cam, Point3{3, 7, 99});
    CHECK(p.u == 3);
    CHECK(p.v == 7);

    cam.coeffs = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    const Point2 q = project(cam, Point3{2, 4, 1});
    CHECK(q.u == doctest::Approx(1.0));
    CHECK(q.v == doctest::Approx(2.0));
}

TEST_CASE("project rejects near-zero denominators") {
    CameraModel cam;
    cam.coeffs = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    // L11*z + 1 = -1e-15
    CHECK_THROWS_AS(project(cam, Point3{0, 0, -1.0 - 1e-15}), DegenerateError);
}

TEST_CASE("calibrate recovers a known camera from 25 noiseless balls") {
    const CameraModel truth = fixture_camera(0);
    CalibrationSet set;
    for (const Point3& ball : calibration_balls())
        set.pairs.push_back({ball, project(truth, ball)});

    CalibrationReport report;
    const CameraModel got = calibrate(set, 0, &report);
    CHECK(report.rms < 1e-6);
    for (const auto& pair : set.pairs) {
        const Point2 p = project(got, pair.object);
        CHECK(std::abs(p.u - pair.image.u) < 1e-6);
        CHECK(std::abs(p.v - pair.image.v) < 1e-6);
    }
}

TEST_CASE("calibrate: underdetermined and degenerate configurations") {
    const CameraModel truth = fixture_camera(0);
    CalibrationSet five;
    for (int i = 0; i < 5; ++i) {
        const Point3 p{10.0 * i, 5.0 * i + 1, 3.0 * i + 2};
        five.pairs.push_back({p, project(truth, p)});
    }
    CHECK_THROWS_AS(calibrate(five), DegenerateError);

    // All calibration points on z = 0: ill-conditioned by construction.
    CalibrationSet coplanar;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const Point3 p{20.0 * i, 20.0 * j, 0.0};
            coplanar.pairs.push_back({p, project(truth, p)});
        }
    CalibrationReport report;
    CHECK_THROWS_AS(calibrate(coplanar, 0, &report), DegenerateError);
    CHECK(report.condition > 1e10);
}

TEST_CASE("calibration RMS stays flat as noiseless points accumulate") {
    const CameraModel truth = fixture_camera(1);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> coord(0.0, 200.0);
    CalibrationSet set;
    for (int i = 0; i < 8; ++i) {
        const Point3 p{coord(rng), coord(rng), coord(rng) / 2};
        set.pairs.push_back({p, project(truth, p)});
    }
    double prev = std::numeric_limits<double>::infinity();
    for (int extra = 0; extra < 10; ++extra) {
        CalibrationReport report;
        calibrate(set, 1, &report);
        CHECK(report.rms <= prev + 1e-12);
        prev = report.rms;
        const Point3 p{coord(rng), coord(rng), coord(rng) / 2};
        set.pairs.push_back({p, project(truth, p)});
    }
}

TEST_CASE("triangulate round trips noiseless observations") {
    const CameraModel cam0 = fixture_camera(0);
    const CameraModel cam1 = fixture_camera(1);
    const Point3 p{10, 20, 30};
    const std::vector<Observation> obs = {{cam0, project(cam0, p)},
                                          {cam1, project(cam1, p)}};
    double rms = -1;
    const Point3 got = triangulate(obs, &rms);
    CHECK(std::abs(got.x - 10) < 1e-9);
    CHECK(std::abs(got.y - 20) < 1e-9);
    CHECK(std::abs(got.z - 30) < 1e-9);
    CHECK(rms < 1e-9);
}

TEST_CASE("triangulate rejects degenerate geometry") {
    const CameraModel cam0 = fixture_camera(0);
    const Point3 p{10, 20, 30};
    const Point2 uv = project(cam0, p);
    const std::vector<Observation> same = {{cam0, uv}, {cam0, uv}};
    CHECK_THROWS_AS(triangulate(same), DegenerateError);

    const std::vector<Observation> one = {{cam0, uv}};
    CHECK_THROWS_AS(triangulate(one), std::invalid_argument);
}

TEST_CASE("triangulate handles four views") {
    std::vector<CameraModel> cams;
    for (int k = 0; k < 4; ++k) {
        CameraModel cam = fixture_camera(k % 2);
        cam.id = k;
        cam.coeffs[3] += 25.0 * k; // shift the principal point per view
        cam.coeffs[0] += 0.05 * k;
        cams.push_back(cam);
    }
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> coord(-50.0, 150.0);
    for (int i = 0; i < 50; ++i) {
        const Point3 p{coord(rng), coord(rng), coord(rng)};
        std::vector<Observation> obs;
        for (const auto& cam : cams)
            obs.push_back({cam, project(cam, p)});
        double rms = -1;
        const Point3 got = triangulate(obs, &rms);
        CHECK(std::abs(got.x - p.x) < 1e-8);
        CHECK(std::abs(got.y - p.y) < 1e-8);
        CHECK(std::abs(got.z - p.z) < 1e-8);
        CHECK(rms < 1e-8);
    }
}

TEST_CASE("camera CSV round trip keeps full precision") {
    const std::string path = "cams_test.csv";
    std::vector<CameraModel> cams = {fixture_camera(0), fixture_camera(1)};
    cams[0].coeffs[4] = 1.0 / 3.0;
    write_cameras_csv(path, cams);
    const auto back = read_cameras_csv(path);
    REQUIRE(back.size() == 2);
    for (int k = 0; k < 2; ++k) {
        CHECK(back[k].id == cams[k].id);
        for (int i = 0; i < 11; ++i)
            CHECK(back[k].coeffs[i] == cams[k].coeffs[i]);
    }
    std::remove(path.c_str());
}
