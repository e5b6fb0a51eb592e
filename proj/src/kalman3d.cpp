#include "spxtrack/kalman3d.hpp"

#include <cmath>
#include <stdexcept>

namespace spx {

namespace {

bool finite(const Point3& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

Eigen::Matrix<double, 6, 6> transition() {
    Eigen::Matrix<double, 6, 6> f = Eigen::Matrix<double, 6, 6>::Identity();
    f.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity();
    return f;
}

} // namespace

Kalman3D::Kalman3D(const Point3& p0, const Point3& p1, const KalmanConfig& config) {
    if (!finite(p0) || !finite(p1))
        throw std::invalid_argument("Kalman3D: non-finite initial positions");
    if (config.process_noise <= 0 || config.measurement_noise <= 0 ||
        config.init_pos_var <= 0 || config.init_vel_var <= 0)
        throw std::invalid_argument("Kalman3D: noise parameters must be positive");
    mean_ << p1.x, p1.y, p1.z, p1.x - p0.x, p1.y - p0.y, p1.z - p0.z;
    cov_.block<3, 3>(0, 0) = config.init_pos_var * Eigen::Matrix3d::Identity();
    cov_.block<3, 3>(3, 3) = config.init_vel_var * Eigen::Matrix3d::Identity();
    q_ = config.process_noise;
    r_ = config.measurement_noise;
}

Point3 Kalman3D::predict() {
    const Mat6 f = transition();
    mean_ = f * mean_;
    cov_ = f * cov_ * f.transpose() + q_ * Mat6::Identity();
    cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();
    ++frames_since_update_;
    return position();
}

void Kalman3D::update(const Point3& measurement) {
    if (!finite(measurement))
        throw std::invalid_argument("Kalman3D: non-finite measurement");
    Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Zero();
    h.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity();

    const Eigen::Vector3d z(measurement.x, measurement.y, measurement.z);
    const Eigen::Vector3d innovation = z - h * mean_;
    const Eigen::Matrix3d s =
        h * cov_ * h.transpose() + r_ * Eigen::Matrix3d::Identity();
    const Eigen::Matrix<double, 6, 3> gain =
        cov_ * h.transpose() * s.inverse();

    mean_ += gain * innovation;
    // Joseph form keeps the covariance symmetric PSD under roundoff.
    const Mat6 ikh = Mat6::Identity() - gain * h;
    cov_ = ikh * cov_ * ikh.transpose() +
           gain * (r_ * Eigen::Matrix3d::Identity()) * gain.transpose();
    cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();
    frames_since_update_ = 0;
}

Point3 Kalman3D::position() const {
    return Point3{mean_(0), mean_(1), mean_(2)};
}

Point3 Kalman3D::velocity() const {
    return Point3{mean_(3), mean_(4), mean_(5)};
}

} // namespace spx
