#include "spxtrack/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "spxtrack/error.hpp"

namespace spx {

namespace {

constexpr double kProjectionDenominatorTol = 1e-12;
constexpr double kConditionLimit = 1e10;

double rms(const std::vector<double>& values) {
    if (values.empty())
        return 0;
    double s = 0;
    for (double v : values)
        s += v * v;
    return std::sqrt(s / values.size());
}

} // namespace

Point2 project(const CameraModel& cam, const Point3& p) {
    const auto& L = cam.coeffs;
    const double den = L[8] * p.x + L[9] * p.y + L[10] * p.z + 1.0;
    if (std::abs(den) <= kProjectionDenominatorTol)
        throw DegenerateError("project: point at infinity for camera " +
                              std::to_string(cam.id));
    return Point2{(L[0] * p.x + L[1] * p.y + L[2] * p.z + L[3]) / den,
                  (L[4] * p.x + L[5] * p.y + L[6] * p.z + L[7]) / den};
}

CameraModel calibrate(const CalibrationSet& set, int cam_id,
                      CalibrationReport* report) {
    const std::size_t n = set.pairs.size();
    if (n < 6)
        throw DegenerateError(
            "calibrate: underdetermined, need at least 6 points, got " +
            std::to_string(n));

    // Condition both coordinate sets: zero centroid, RMS radius sqrt(dim).
    Eigen::Vector3d c3 = Eigen::Vector3d::Zero();
    Eigen::Vector2d c2 = Eigen::Vector2d::Zero();
    for (const auto& pair : set.pairs) {
        c3 += Eigen::Vector3d(pair.object.x, pair.object.y, pair.object.z);
        c2 += Eigen::Vector2d(pair.image.u, pair.image.v);
    }
    c3 /= static_cast<double>(n);
    c2 /= static_cast<double>(n);
    double r3 = 0, r2 = 0;
    for (const auto& pair : set.pairs) {
        r3 += (Eigen::Vector3d(pair.object.x, pair.object.y, pair.object.z) - c3)
                  .squaredNorm();
        r2 += (Eigen::Vector2d(pair.image.u, pair.image.v) - c2).squaredNorm();
    }
    const double s3 = std::sqrt(3.0) / std::max(std::sqrt(r3 / n), 1e-12);
    const double s2 = std::sqrt(2.0) / std::max(std::sqrt(r2 / n), 1e-12);

    Eigen::MatrixXd A(2 * n, 11);
    Eigen::VectorXd b(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d X =
            s3 * (Eigen::Vector3d(set.pairs[i].object.x, set.pairs[i].object.y,
                                  set.pairs[i].object.z) -
                  c3);
        const Eigen::Vector2d x =
            s2 * (Eigen::Vector2d(set.pairs[i].image.u, set.pairs[i].image.v) - c2);
        A.row(2 * i) << X.x(), X.y(), X.z(), 1, 0, 0, 0, 0, -x.x() * X.x(),
            -x.x() * X.y(), -x.x() * X.z();
        b(2 * i) = x.x();
        A.row(2 * i + 1) << 0, 0, 0, 0, X.x(), X.y(), X.z(), 1, -x.y() * X.x(),
            -x.y() * X.y(), -x.y() * X.z();
        b(2 * i + 1) = x.y();
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double condition = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (report)
        report->condition = condition;
    if (!(condition < kConditionLimit))
        throw DegenerateError(
            "calibrate: degenerate point configuration (condition estimate " +
            std::to_string(condition) + ")");

    const Eigen::VectorXd Ln = svd.solve(b);

    // Undo the conditioning: P = inv(T2) * Pn * T3, rescaled so P(2,3) = 1.
    Eigen::Matrix<double, 3, 4> Pn;
    Pn << Ln(0), Ln(1), Ln(2), Ln(3), Ln(4), Ln(5), Ln(6), Ln(7), Ln(8), Ln(9),
        Ln(10), 1.0;
    Eigen::Matrix3d T2inv = Eigen::Matrix3d::Identity();
    T2inv(0, 0) = 1.0 / s2;
    T2inv(1, 1) = 1.0 / s2;
    T2inv(0, 2) = c2.x();
    T2inv(1, 2) = c2.y();
    Eigen::Matrix4d T3 = Eigen::Matrix4d::Identity();
    T3.block<3, 3>(0, 0) *= s3;
    T3.block<3, 1>(0, 3) = -s3 * c3;
    Eigen::Matrix<double, 3, 4> P = T2inv * Pn * T3;
    if (std::abs(P(2, 3)) <= kProjectionDenominatorTol)
        throw DegenerateError("calibrate: camera at infinity");
    P /= P(2, 3);

    CameraModel cam;
    cam.id = cam_id;
    cam.coeffs = {P(0, 0), P(0, 1), P(0, 2), P(0, 3), P(1, 0), P(1, 1),
                  P(1, 2), P(1, 3), P(2, 0), P(2, 1), P(2, 2)};

    if (report) {
        report->reprojection_error.clear();
        report->reprojection_error.reserve(n);
        for (const auto& pair : set.pairs) {
            const Point2 q = project(cam, pair.object);
            const double du = q.u - pair.image.u;
            const double dv = q.v - pair.image.v;
            report->reprojection_error.push_back(std::sqrt(du * du + dv * dv));
        }
        report->rms = rms(report->reprojection_error);
    }
    return cam;
}

Point3 triangulate(std::span<const Observation> observations, double* rms_out) {
    if (observations.size() < 2)
        throw std::invalid_argument("triangulate: need at least 2 observations");

    const std::size_t k = observations.size();
    Eigen::MatrixXd A(2 * k, 3);
    Eigen::VectorXd b(2 * k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& L = observations[i].camera.coeffs;
        const double u = observations[i].image.u;
        const double v = observations[i].image.v;
        A.row(2 * i) << L[0] - u * L[8], L[1] - u * L[9], L[2] - u * L[10];
        b(2 * i) = u - L[3];
        A.row(2 * i + 1) << L[4] - v * L[8], L[5] - v * L[9], L[6] - v * L[10];
        b(2 * i + 1) = v - L[7];
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > smax * 1e-10))
        throw DegenerateError("triangulate: degenerate camera geometry");
    const Eigen::Vector3d X = svd.solve(b);

    const Point3 p{X.x(), X.y(), X.z()};
    if (rms_out) {
        std::vector<double> errs;
        errs.reserve(k);
        for (const auto& obs : observations) {
            const Point2 q = project(obs.camera, p);
            const double du = q.u - obs.image.u;
            const double dv = q.v - obs.image.v;
            errs.push_back(std::sqrt(du * du + dv * dv));
        }
        *rms_out = rms(errs);
    }
    return p;
}

void write_cameras_csv(const std::string& path, const std::vector<CameraModel>& cams) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << "cam_id";
    for (int i = 1; i <= 11; ++i)
        out << ",L" << i;
    out << "\n";
    out.precision(17);
    for (const auto& cam : cams) {
        out << cam.id;
        for (double c : cam.coeffs)
            out << "," << c;
        out << "\n";
    }
}

std::vector<CameraModel> read_cameras_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingInputError("cannot open " + path);
    std::vector<CameraModel> cams;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.rfind("cam_id", 0) == 0)
            continue;
        std::istringstream ss(line);
        CameraModel cam;
        char comma;
        ss >> cam.id;
        for (double& c : cam.coeffs) {
            ss >> comma >> c;
        }
        if (!ss)
            throw ParseError("bad camera row at " + path + ":" +
                             std::to_string(lineno));
        cams.push_back(cam);
    }
    if (cams.empty())
        throw ParseError("no cameras in " + path);
    return cams;
}

} // namespace spx
