#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cstring>
#include <vector>

#include "spxtrack/frame.hpp"
#include "spxtrack/geometry.hpp"
#include "spxtrack/kalman3d.hpp"
#include "spxtrack/matcher.hpp"
#include "spxtrack/slic.hpp"

namespace py = pybind11;
using namespace spx;

namespace {

Frame frame_from_array(const py::array_t<std::uint8_t, py::array::c_style |
                                                           py::array::forcecast>& image) {
    if (image.ndim() != 3 || image.shape(2) != 3)
        throw std::invalid_argument("image must be HxWx3 uint8");
    const int h = static_cast<int>(image.shape(0));
    const int w = static_cast<int>(image.shape(1));
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
    std::memcpy(rgb.data(), image.data(), rgb.size());
    return Frame(w, h, std::move(rgb));
}

Segmentation segmentation_from_labels(
    const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& labels) {
    if (labels.ndim() != 2)
        throw std::invalid_argument("labels must be HxW int32");
    Segmentation seg;
    seg.height = static_cast<int>(labels.shape(0));
    seg.width = static_cast<int>(labels.shape(1));
    seg.labels.assign(labels.data(), labels.data() + labels.size());
    std::int32_t mx = -1;
    for (const auto l : seg.labels) {
        if (l < 0)
            throw std::invalid_argument("labels must be nonnegative");
        mx = std::max(mx, l);
    }
    seg.n_labels = mx + 1;
    return seg;
}

CameraModel camera_from_coeffs(const std::array<double, 11>& coeffs, int id = 0) {
    CameraModel cam;
    cam.id = id;
    cam.coeffs = coeffs;
    return cam;
}

} // namespace

PYBIND11_MODULE(_spxtrack, m) {
    m.doc() = "multi-camera 3D marker tracking: SLIC superpixels, DLT geometry, "
              "constant-velocity Kalman filtering, weighted feature matching";
    m.attr("__version__") = "0.1.0";

    m.def(
        "rgb_to_hsv",
        [](double r, double g, double b) {
            const Hsv hsv = rgb_to_hsv(r, g, b);
            return py::make_tuple(hsv.h, hsv.s, hsv.v);
        },
        py::arg("r"), py::arg("g"), py::arg("b"),
        "RGB in [0,255] -> (h, s, v) on [0,1]");
    m.def("to_gray", &to_gray, py::arg("r"), py::arg("g"), py::arg("b"));

    py::class_<Superpixel>(m, "Superpixel")
        .def_readonly("label", &Superpixel::label)
        .def_readonly("pixel_count", &Superpixel::pixel_count)
        .def_readonly("cx", &Superpixel::cx)
        .def_readonly("cy", &Superpixel::cy)
        .def_readonly("mean_sat", &Superpixel::mean_sat)
        .def_readonly("mean_hue", &Superpixel::mean_hue)
        .def_readonly("mean_gray", &Superpixel::mean_gray)
        .def_readonly("mean_red", &Superpixel::mean_red)
        .def_readonly("mean_green", &Superpixel::mean_green)
        .def_readonly("mean_blue", &Superpixel::mean_blue)
        .def("__repr__", [](const Superpixel& sp) {
            return "Superpixel(label=" + std::to_string(sp.label) +
                   ", pixels=" + std::to_string(sp.pixel_count) + ")";
        });

    m.def(
        "slic_segment",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& image,
           int n_superpixels, double compactness, int iters, int workers) {
            const Frame frame = frame_from_array(image);
            SlicParams params;
            params.n_superpixels = n_superpixels;
            params.compactness = compactness;
            params.max_iters = iters;
            params.n_workers = workers;
            Segmentation seg;
            {
                py::gil_scoped_release release;
                seg = slic_segment(frame, params);
            }
            py::array_t<std::int32_t> labels({seg.height, seg.width});
            std::memcpy(labels.mutable_data(), seg.labels.data(),
                        seg.labels.size() * sizeof(std::int32_t));
            return labels;
        },
        py::arg("image"), py::arg("n_superpixels"), py::arg("compactness") = 10.0,
        py::arg("iters") = 10, py::arg("workers") = 0,
        "SLIC superpixel labels for an HxWx3 uint8 image");

    m.def(
        "superpixel_stats",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& image,
           const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& labels) {
            const Frame frame = frame_from_array(image);
            const Segmentation seg = segmentation_from_labels(labels);
            return superpixel_stats(seg, frame);
        },
        py::arg("image"), py::arg("labels"),
        "Per-label centroid and channel means (hue averaged circularly)");

    m.def(
        "calibrate",
        [](const std::vector<std::array<double, 3>>& object_points,
           const std::vector<std::array<double, 2>>& image_points, int cam_id) {
            if (object_points.size() != image_points.size())
                throw std::invalid_argument("point lists differ in length");
            CalibrationSet set;
            for (std::size_t i = 0; i < object_points.size(); ++i)
                set.pairs.push_back(
                    {Point3{object_points[i][0], object_points[i][1], object_points[i][2]},
                     Point2{image_points[i][0], image_points[i][1]}});
            CalibrationReport report;
            const CameraModel cam = calibrate(set, cam_id, &report);
            return py::make_tuple(cam.coeffs, report.rms);
        },
        py::arg("object_points"), py::arg("image_points"), py::arg("cam_id") = 0,
        "DLT least squares -> (L1..L11, reprojection rms)");

    m.def(
        "project",
        [](const std::array<double, 11>& coeffs, const std::array<double, 3>& p) {
            const Point2 q =
                project(camera_from_coeffs(coeffs), Point3{p[0], p[1], p[2]});
            return py::make_tuple(q.u, q.v);
        },
        py::arg("coeffs"), py::arg("point"));

    m.def(
        "triangulate",
        [](const std::vector<std::array<double, 11>>& cameras,
           const std::vector<std::array<double, 2>>& image_points) {
            if (cameras.size() != image_points.size())
                throw std::invalid_argument("need one image point per camera");
            std::vector<Observation> obs;
            for (std::size_t i = 0; i < cameras.size(); ++i)
                obs.push_back({camera_from_coeffs(cameras[i], static_cast<int>(i)),
                               Point2{image_points[i][0], image_points[i][1]}});
            double rms = 0;
            const Point3 p = triangulate(obs, &rms);
            return py::make_tuple(py::make_tuple(p.x, p.y, p.z), rms);
        },
        py::arg("cameras"), py::arg("image_points"),
        "Least-squares 3D point from k >= 2 views -> ((x,y,z), rms)");

    py::class_<Kalman3D>(m, "Kalman3D")
        .def(py::init([](const std::array<double, 3>& p0,
                         const std::array<double, 3>& p1, double process_noise,
                         double measurement_noise, double init_pos_var,
                         double init_vel_var) {
                 KalmanConfig cfg;
                 cfg.process_noise = process_noise;
                 cfg.measurement_noise = measurement_noise;
                 cfg.init_pos_var = init_pos_var;
                 cfg.init_vel_var = init_vel_var;
                 return Kalman3D(Point3{p0[0], p0[1], p0[2]},
                                 Point3{p1[0], p1[1], p1[2]}, cfg);
             }),
             py::arg("p0"), py::arg("p1"), py::arg("process_noise") = 0.05,
             py::arg("measurement_noise") = 0.5, py::arg("init_pos_var") = 1.0,
             py::arg("init_vel_var") = 1.0)
        .def("predict",
             [](Kalman3D& f) {
                 const Point3 p = f.predict();
                 return py::make_tuple(p.x, p.y, p.z);
             })
        .def("update",
             [](Kalman3D& f, const std::array<double, 3>& z) {
                 f.update(Point3{z[0], z[1], z[2]});
             },
             py::arg("measurement"))
        .def_property_readonly("position",
                               [](const Kalman3D& f) {
                                   const Point3 p = f.position();
                                   return py::make_tuple(p.x, p.y, p.z);
                               })
        .def_property_readonly("velocity",
                               [](const Kalman3D& f) {
                                   const Point3 v = f.velocity();
                                   return py::make_tuple(v.x, v.y, v.z);
                               })
        .def_property_readonly("frames_since_update", &Kalman3D::frames_since_update);

    m.def(
        "select_best",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
           const std::array<double, 7>& weights) {
            if (features.ndim() != 2 || features.shape(1) != 7)
                throw std::invalid_argument("features must be Nx7");
            std::vector<FeatureVector> fvs(features.shape(0));
            for (py::ssize_t i = 0; i < features.shape(0); ++i)
                for (int k = 0; k < 7; ++k)
                    fvs[i].f[k] = features.at(i, k);
            Weights w;
            w.w = weights;
            const Selection sel = select_best(fvs, w);
            return py::make_tuple(sel.index, sel.score);
        },
        py::arg("features"),
        py::arg("weights") = std::array<double, 7>{3, 1, 3, 2, 2, 1, 3},
        "Best candidate by weighted min-max-normalized mismatch -> (index, score)");

    m.def("circular_hue_distance", &circular_hue_distance, py::arg("h0"),
          py::arg("h1"));
    m.def("nslic", &nslic, py::arg("marker_pixels"), py::arg("frame_w"),
          py::arg("frame_h"),
          "Full-frame superpixel count for a marker of the given pixel area");
}
