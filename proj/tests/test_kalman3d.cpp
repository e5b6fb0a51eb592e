#include <doctest.h>

#include <cmath>
#include <random>

#include "spxtrack/kalman3d.hpp"

using namespace spx;

namespace {

KalmanConfig config() {
    KalmanConfig c;
    c.process_noise = 0.05;
    c.measurement_noise = 0.5;
    c.init_pos_var = 1.0;
    c.init_vel_var = 1.0;
    return c;
}

// Scalar position/velocity filter, the per-axis oracle.
struct Scalar2State {
    double x, v;
    double p[2][2];
    double q, r;

    void predict() {
        x += v;
        const double p00 = p[0][0] + p[0][1] + p[1][0] + p[1][1] + q;
        const double p01 = p[0][1] + p[1][1];
        const double p10 = p[1][0] + p[1][1];
        const double p11 = p[1][1] + q;
        p[0][0] = p00;
        p[0][1] = p01;
        p[1][0] = p10;
        p[1][1] = p11;
    }

    void update(double z) {
        const double s = p[0][0] + r;
        const double k0 = p[0][0] / s;
        const double k1 = p[1][0] / s;
        const double innov = z - x;
        x += k0 * innov;
        v += k1 * innov;
        // Joseph form P' = A P A' + r K K' with A = [[1-k0, 0], [-k1, 1]],
        // expanded by hand.
        const double a00 = 1 - k0;
        const double a10 = -k1;
        const double m00 = a00 * p[0][0];
        const double m01 = a00 * p[0][1];
        const double m10 = a10 * p[0][0] + p[1][0];
        const double m11 = a10 * p[0][1] + p[1][1];
        double n[2][2];
        n[0][0] = m00 * a00 + k0 * r * k0;
        n[0][1] = m00 * a10 + m01 + k0 * r * k1;
        n[1][0] = m10 * a00 + k1 * r * k0;
        n[1][1] = m10 * a10 + m11 + k1 * r * k1;
        p[0][0] = n[0][0];
        p[0][1] = (n[0][1] + n[1][0]) / 2;
        p[1][0] = p[0][1];
        p[1][1] = n[1][1];
    }
};

double min_eigenvalue(const Kalman3D::Mat6& m) {
    Eigen::SelfAdjointEigenSolver<Kalman3D::Mat6> solver(m);
    return solver.eigenvalues().minCoeff();
}

} // namespace

TEST_CASE("init seeds position and velocity from two frames") {
    {
        const Kalman3D f(Point3{1, 2, 3}, Point3{1, 2, 3}, config());
        CHECK(f.position().x == 1);
        CHECK(f.position().y == 2);
        CHECK(f.position().z == 3);
        CHECK(f.velocity().x == 0);
        CHECK(f.velocity().y == 0);
        CHECK(f.velocity().z == 0);
    }
    {
        const Kalman3D f(Point3{0, 0, 0}, Point3{1, 0, 0}, config());
        CHECK(f.velocity().x == 1);
    }
    {
        const Kalman3D f(Point3{2, 3, 4}, Point3{2.5, 3.1, 3.8}, config());
        CHECK(f.velocity().x == doctest::Approx(0.5));
        CHECK(f.velocity().y == doctest::Approx(0.1));
        CHECK(f.velocity().z == doctest::Approx(-0.2));
    }
    CHECK_THROWS_AS(
        Kalman3D(Point3{std::nan(""), 0, 0}, Point3{0, 0, 0}, config()),
        std::invalid_argument);
}

TEST_CASE("predict advances by one frame of velocity") {
    Kalman3D f(Point3{-1, 0, 0}, Point3{0, 0, 0}, config()); // velocity (1,0,0)
    const Point3 p = f.predict();
    CHECK(p.x == doctest::Approx(1.0));
    CHECK(p.y == doctest::Approx(0.0));

    Kalman3D still(Point3{4, 5, 6}, Point3{4, 5, 6}, config());
    const Point3 q = still.predict();
    CHECK(q.x == 4);
    CHECK(q.y == 5);
    CHECK(q.z == 6);
}

TEST_CASE("10 successive predicts follow the closed-form linear motion") {
    Kalman3D f(Point3{-1, -2, -3}, Point3{0, 0, 0}, config()); // velocity (1,2,3)
    Point3 p{};
    for (int i = 0; i < 10; ++i)
        p = f.predict();
    CHECK(p.x == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(p.z == doctest::Approx(30.0).epsilon(1e-12));
    CHECK(f.frames_since_update() == 10);
}

TEST_CASE("update: zero innovation leaves the mean unchanged") {
    Kalman3D f(Point3{0, 0, 0}, Point3{1, 1, 1}, config());
    const Point3 predicted = f.predict();
    f.update(predicted);
    CHECK(f.position().x == doctest::Approx(predicted.x).epsilon(1e-12));
    CHECK(f.position().y == doctest::Approx(predicted.y).epsilon(1e-12));
    CHECK(f.position().z == doctest::Approx(predicted.z).epsilon(1e-12));
    CHECK(f.frames_since_update() == 0);
}

TEST_CASE("update: huge measurement noise pins the posterior to the prior") {
    KalmanConfig c = config();
    c.measurement_noise = 1e12;
    c.init_pos_var = 1.0;
    Kalman3D f(Point3{0, 0, 0}, Point3{0, 0, 0}, c);
    f.predict();
    f.update(Point3{100, 100, 100});
    CHECK(std::abs(f.position().x) < 1e-6 * 100);
    CHECK(std::abs(f.position().y) < 1e-6 * 100);
}

TEST_CASE("update matches the scalar per-axis oracle") {
    KalmanConfig c = config();
    Kalman3D f(Point3{0, 0, 0}, Point3{1, 2, 3}, c);

    Scalar2State axes[3];
    const double v0[3] = {1, 2, 3};
    for (int a = 0; a < 3; ++a) {
        axes[a].x = v0[a];
        axes[a].v = v0[a];
        axes[a].p[0][0] = c.init_pos_var;
        axes[a].p[0][1] = axes[a].p[1][0] = 0;
        axes[a].p[1][1] = c.init_vel_var;
        axes[a].q = c.process_noise;
        axes[a].r = c.measurement_noise;
    }

    std::mt19937 rng(5);
    std::normal_distribution<double> noise(0.0, 0.7);
    for (int step = 0; step < 25; ++step) {
        f.predict();
        for (auto& ax : axes)
            ax.predict();
        const double z[3] = {axes[0].x + noise(rng), axes[1].x + noise(rng),
                             axes[2].x + noise(rng)};
        f.update(Point3{z[0], z[1], z[2]});
        for (int a = 0; a < 3; ++a)
            axes[a].update(z[a]);

        CHECK(f.position().x == doctest::Approx(axes[0].x).epsilon(1e-10));
        CHECK(f.position().y == doctest::Approx(axes[1].x).epsilon(1e-10));
        CHECK(f.position().z == doctest::Approx(axes[2].x).epsilon(1e-10));
        CHECK(f.velocity().x == doctest::Approx(axes[0].v).epsilon(1e-10));
        CHECK(f.covariance()(0, 0) == doctest::Approx(axes[0].p[0][0]).epsilon(1e-10));
        CHECK(f.covariance()(3, 3) == doctest::Approx(axes[0].p[1][1]).epsilon(1e-10));
        // Cross-axis blocks stay exactly zero.
        CHECK(f.covariance()(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(f.covariance()(0, 4) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("noiseless constant-velocity track converges within 10 cycles") {
    Kalman3D f(Point3{0, 0, 0}, Point3{0.5, -0.25, 1.0}, config());
    const Point3 v{0.5, -0.25, 1.0};
    Point3 truth{0.5, -0.25, 1.0};
    double err = 1e9;
    for (int n = 0; n < 10; ++n) {
        const Point3 p = f.predict();
        truth = Point3{truth.x + v.x, truth.y + v.y, truth.z + v.z};
        err = std::hypot(p.x - truth.x, p.y - truth.y, p.z - truth.z);
        f.update(truth);
    }
    CHECK(err < 1e-6);
}

TEST_CASE("withheld measurements coast exactly on the last posterior") {
    Kalman3D f(Point3{0, 0, 0}, Point3{1, 2, -1}, config());
    for (int i = 0; i < 5; ++i) {
        f.predict();
        f.update(Point3{1.0 + i, 2.0 + i, -1.0 - i});
    }
    const Point3 vel = f.velocity();
    Point3 expect = f.position();
    const int k = 7;
    Point3 p{};
    for (int i = 0; i < k; ++i) {
        p = f.predict();
        // One addition per frame, the same arithmetic the filter performs.
        expect = Point3{expect.x + vel.x, expect.y + vel.y, expect.z + vel.z};
    }
    CHECK(p.x == expect.x);
    CHECK(p.y == expect.y);
    CHECK(p.z == expect.z);
    CHECK(f.frames_since_update() == k);
}

TEST_CASE("covariance stays symmetric PSD under random interleavings") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> coord(-100.0, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
        KalmanConfig c = config();
        c.process_noise = 0.01 + (rng() % 100) / 25.0;
        c.measurement_noise = 0.01 + (rng() % 100) / 10.0;
        Kalman3D f(Point3{coord(rng), coord(rng), coord(rng)},
                   Point3{coord(rng), coord(rng), coord(rng)}, c);
        for (int step = 0; step < 200; ++step) {
            if (rng() % 3 == 0)
                f.update(Point3{coord(rng), coord(rng), coord(rng)});
            else
                f.predict();
            const auto& cov = f.covariance();
            CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-9);
            CHECK(min_eigenvalue(cov) >= -1e-9);
        }
    }
}

TEST_CASE("non-finite measurements are rejected") {
    Kalman3D f(Point3{0, 0, 0}, Point3{1, 0, 0}, config());
    f.predict();
    CHECK_THROWS_AS(f.update(Point3{std::nan(""), 0, 0}), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(f.update(Point3{0, inf, 0}), std::invalid_argument);
}
