#pragma once

#include <Eigen/Dense>

#include "spxtrack/geometry.hpp"

namespace spx {

struct KalmanConfig {
    double process_noise = 0.05;      // q, units^2 per frame
    double measurement_noise = 0.5;   // r, units^2
    double init_pos_var = 1.0;
    double init_vel_var = 1.0;
};

// Constant-velocity filter over (X,Y,Z,Vx,Vy,Vz) in object space, one frame
// per step. The system is block-diagonal over axes, so it behaves exactly
// like three independent position/velocity filters.
class Kalman3D {
public:
    using Mat6 = Eigen::Matrix<double, 6, 6>;
    using Vec6 = Eigen::Matrix<double, 6, 1>;

    // Seeds position from p1 and velocity from p1 - p0 (consecutive frames).
    Kalman3D(const Point3& p0, const Point3& p1, const KalmanConfig& config);

    // Advances one frame: position += velocity, covariance grows by q.
    // Returns the predicted position.
    Point3 predict();

    // Position measurement update. Throws std::invalid_argument for a
    // non-finite measurement; callers coast instead.
    void update(const Point3& measurement);

    Point3 position() const;
    Point3 velocity() const;
    const Mat6& covariance() const { return cov_; }
    int frames_since_update() const { return frames_since_update_; }

private:
    Vec6 mean_ = Vec6::Zero();
    Mat6 cov_ = Mat6::Zero();
    double q_ = 0;
    double r_ = 0;
    int frames_since_update_ = 0;
};

} // namespace spx
