#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace spx {

struct Point2 {
    double u = 0;
    double v = 0;
};

struct Point3 {
    double x = 0;
    double y = 0;
    double z = 0;
};

// The 11 DLT coefficients L1..L11 of one camera:
//   u = (L1 x + L2 y + L3 z + L4) / (L9 x + L10 y + L11 z + 1)
//   v = (L5 x + L6 y + L7 z + L8) / (L9 x + L10 y + L11 z + 1)
struct CameraModel {
    int id = 0;
    std::array<double, 11> coeffs{};
};

struct CalibrationPair {
    Point3 object;
    Point2 image;
};

struct CalibrationSet {
    std::vector<CalibrationPair> pairs;
};

struct CalibrationReport {
    std::vector<double> reprojection_error; // px, per calibration point
    double rms = 0;                         // px
    double condition = 0;                   // design-matrix condition estimate
};

// Linear DLT least squares over the rearranged projection equations, with
// centroid/scale conditioning of both coordinate sets. Throws
// DegenerateError for <6 points or an ill-conditioned (e.g. coplanar)
// configuration.
CameraModel calibrate(const CalibrationSet& set, int cam_id = 0,
                      CalibrationReport* report = nullptr);

Point2 project(const CameraModel& cam, const Point3& p);

struct Observation {
    CameraModel camera;
    Point2 image;
};

// Least-squares 3D point from k >= 2 views; rms_out, when given, receives
// the RMS reprojection error over the views.
Point3 triangulate(std::span<const Observation> observations,
                   double* rms_out = nullptr);

// Camera model file: CSV cam_id,L1..L11 at full decimal precision.
void write_cameras_csv(const std::string& path, const std::vector<CameraModel>& cams);
std::vector<CameraModel> read_cameras_csv(const std::string& path);

} // namespace spx
