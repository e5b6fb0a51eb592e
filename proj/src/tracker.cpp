#include "spxtrack/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spxtrack/csv.hpp"
#include "spxtrack/error.hpp"
#include "spxtrack/image_io.hpp"

namespace spx {

namespace {

using Clock = std::chrono::steady_clock;

struct StageScope {
    double& sink;
    Clock::time_point start = Clock::now();
    explicit StageScope(double& s) : sink(s) {}
    ~StageScope() {
        sink += std::chrono::duration<double>(Clock::now() - start).count();
    }
};

bool inside_frame(const Point2& p, int w, int h) {
    return p.u >= 0 && p.u < w && p.v >= 0 && p.v < h;
}

MarkerAppearance appearance_of(const Superpixel& sp) {
    return MarkerAppearance{sp.mean_sat, sp.mean_hue, sp.mean_gray};
}

} // namespace

DirectoryFrameSource::DirectoryFrameSource(const std::filesystem::path& dir,
                                           int cam_id,
                                           std::optional<BayerPattern> bayer)
    : bayer_(bayer) {
    files_ = list_camera_sequence(dir, cam_id);
    if (files_.empty())
        throw MissingInputError("no cam" + std::to_string(cam_id) +
                                "_* frames in " + dir.string());
    const Frame first = DirectoryFrameSource::frame(0);
    width_ = first.width();
    height_ = first.height();
}

Frame DirectoryFrameSource::frame(int n) {
    if (n < 0 || n >= frame_count())
        throw std::invalid_argument("frame index out of range");
    if (bayer_) {
        const GrayImage mosaic = read_gray_image(files_[n]);
        return demosaic(mosaic.pixels, mosaic.width, mosaic.height, *bayer_, n);
    }
    return read_image(files_[n], n);
}

std::vector<Click> read_clicks_csv(const std::string& path) {
    std::vector<Click> clicks;
    for (std::size_t i = 0; const auto& row : csv_read_rows(path)) {
        ++i;
        const std::string where = path + " row " + std::to_string(i);
        if (row.size() != 5)
            throw ParseError("expected frame,cam_id,marker_name,u,v at " + where);
        Click c;
        c.frame = static_cast<int>(csv_to_long(row[0], where));
        c.cam_id = static_cast<int>(csv_to_long(row[1], where));
        c.marker = row[2];
        c.u = csv_to_double(row[3], where);
        c.v = csv_to_double(row[4], where);
        clicks.push_back(std::move(c));
    }
    return clicks;
}

void write_clicks_csv(const std::string& path, const std::vector<Click>& clicks) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << "frame,cam_id,marker_name,u,v\n";
    out.precision(17);
    for (const auto& c : clicks)
        out << c.frame << "," << c.cam_id << "," << c.marker << "," << c.u << ","
            << c.v << "\n";
}

std::string to_string(TrackStatus status) {
    switch (status) {
    case TrackStatus::Tracked:
        return "tracked";
    case TrackStatus::Coasting:
        return "coasting";
    case TrackStatus::Lost:
        return "lost";
    }
    return "?";
}

TrackStatus track_status_from_string(const std::string& s) {
    if (s == "tracked")
        return TrackStatus::Tracked;
    if (s == "coasting")
        return TrackStatus::Coasting;
    if (s == "lost")
        return TrackStatus::Lost;
    throw ParseError("unknown track status '" + s + "'");
}

TrackerConfig TrackerConfig::from_config(const Config& config) {
    TrackerConfig out;
    out.roi_w = config.get_int("tracker.roi_w");
    out.roi_h = config.get_int("tracker.roi_h");
    out.init_padding = config.get_int("tracker.init_padding");
    out.loss_frames = config.get_int("tracker.loss_frames");
    const std::string mode = config.get_string("tracker.mode");
    if (mode == "3d")
        out.mode = Mode::ThreeD;
    else if (mode == "2d")
        out.mode = Mode::TwoDBaseline;
    else
        throw ParseError("tracker.mode must be 3d or 2d, got '" + mode + "'");

    out.slic.compactness = config.get_double("slic.compactness");
    out.slic.max_iters = config.get_int("slic.iters");
    out.slic.n_workers = config.get_int("slic.workers");
    out.slic.min_region = config.get_int("slic.min_region");
    const std::string space = config.get_string("slic.color_space");
    if (space == "rgb")
        out.slic.color_space = SlicParams::ColorSpace::Rgb;
    else if (space == "hsv")
        out.slic.color_space = SlicParams::ColorSpace::Hsv;
    else
        throw ParseError("slic.color_space must be rgb or hsv, got '" + space + "'");
    out.default_count = config.get_int("slic.count.default");
    out.marker_counts = config.marker_counts();

    const auto weights = config.get_doubles("match.weights");
    if (weights.size() != 7)
        throw ParseError("match.weights must have exactly 7 entries");
    std::copy(weights.begin(), weights.end(), out.weights.w.begin());
    out.gate.max_jump_px = config.get_double("match.gate.max_jump_px");
    out.gate.max_appearance = config.get_double("match.gate.max_appearance");

    out.kalman.process_noise = config.get_double("kalman.process_noise");
    out.kalman.measurement_noise = config.get_double("kalman.measurement_noise");
    out.kalman.init_pos_var = config.get_double("kalman.init_pos_var");
    out.kalman.init_vel_var = config.get_double("kalman.init_vel_var");
    return out;
}

std::string StageTiming::table() const {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(3);
    out << "stage          seconds\n";
    out << "segmentation   " << segmentation_s << "\n";
    out << "matching       " << matching_s << "\n";
    out << "geometry       " << geometry_s << "\n";
    out << "io             " << io_s << "\n";
    out << "total          " << total_s << "\n";
    out << "(DLT calibration time excluded)\n";
    return out.str();
}

Tracker::Tracker(std::vector<CameraModel> cameras, TrackerConfig config)
    : cameras_(std::move(cameras)), config_(std::move(config)) {
    if (config_.mode == TrackerConfig::Mode::ThreeD && cameras_.size() < 2)
        throw std::invalid_argument("3D tracking needs at least 2 cameras");
    if (config_.roi_w < 2 || config_.roi_h < 2)
        throw std::invalid_argument("ROI extent too small");
    // A marker can sit max_jump_px from the prediction and still be a valid
    // detection, so the window must reach at least that far on both sides.
    if (config_.roi_w < 2 * config_.gate.max_jump_px ||
        config_.roi_h < 2 * config_.gate.max_jump_px)
        throw std::invalid_argument(
            "ROI must be at least twice the displacement gate");
}

void Tracker::initialize(const std::vector<Frame>& frames0,
                         const std::vector<Frame>& frames1,
                         const std::vector<Click>& clicks) {
    n_cameras_ = static_cast<int>(frames0.size());
    if (n_cameras_ < 1 || frames1.size() != frames0.size())
        throw std::invalid_argument("initialize: need frames 0 and 1 per camera");
    if (config_.mode == TrackerConfig::Mode::ThreeD &&
        n_cameras_ != static_cast<int>(cameras_.size()))
        throw std::invalid_argument("initialize: camera model count mismatch");

    // Marker order: first appearance in the clicks list.
    std::vector<std::string> names;
    for (const auto& c : clicks)
        if (std::find(names.begin(), names.end(), c.marker) == names.end())
            names.push_back(c.marker);
    if (names.empty())
        throw MissingInputError("clicks: no markers");

    const int n_markers = static_cast<int>(names.size());
    // clicks[frame][cam][marker]
    std::vector<std::vector<std::vector<std::optional<Point2>>>> grid(
        2, std::vector<std::vector<std::optional<Point2>>>(
               n_cameras_, std::vector<std::optional<Point2>>(n_markers)));
    for (const auto& c : clicks) {
        if (c.frame < 0 || c.frame > 1)
            throw ParseError("clicks: frame must be 0 or 1");
        if (c.cam_id < 0 || c.cam_id >= n_cameras_)
            throw ParseError("clicks: cam_id out of range");
        const int m = static_cast<int>(
            std::find(names.begin(), names.end(), c.marker) - names.begin());
        grid[c.frame][c.cam_id][m] = Point2{c.u, c.v};
    }
    for (int t = 0; t < 2; ++t)
        for (int cam = 0; cam < n_cameras_; ++cam)
            for (int m = 0; m < n_markers; ++m)
                if (!grid[t][cam][m])
                    throw MissingInputError("clicks: missing marker '" + names[m] +
                                            "' for camera " + std::to_string(cam) +
                                            " frame " + std::to_string(t));

    markers_.clear();
    markers_.resize(n_markers);
    for (int m = 0; m < n_markers; ++m) {
        MarkerState& state = markers_[m];
        state.name = names[m];
        const auto it = config_.marker_counts.find(state.name);
        state.frame_count =
            it != config_.marker_counts.end() ? it->second : config_.default_count;
        state.appearance_init.resize(n_cameras_);
        state.appearance_prev.resize(n_cameras_);
        state.last_2d.resize(n_cameras_);
        state.velocity_2d.assign(n_cameras_, Point2{0, 0});
    }

    // detections[t][cam][m]: superpixel centroid in full-frame coordinates.
    std::vector<std::vector<std::vector<Point2>>> detections(
        2, std::vector<std::vector<Point2>>(n_cameras_,
                                            std::vector<Point2>(n_markers)));

    for (int t = 0; t < 2; ++t) {
        const auto& frames = t == 0 ? frames0 : frames1;
        for (int cam = 0; cam < n_cameras_; ++cam) {
            const Frame& frame = frames[cam];
            double min_u = frame.width(), max_u = 0;
            double min_v = frame.height(), max_v = 0;
            for (int m = 0; m < n_markers; ++m) {
                const Point2 click = *grid[t][cam][m];
                if (!inside_frame(click, frame.width(), frame.height()))
                    throw std::invalid_argument(
                        "click outside frame: marker '" + names[m] + "', camera " +
                        std::to_string(cam));
                min_u = std::min(min_u, click.u);
                max_u = std::max(max_u, click.u);
                min_v = std::min(min_v, click.v);
                max_v = std::max(max_v, click.v);
            }
            // Bounding box of the clicks grown by the init padding.
            const int x0 = std::max(0, static_cast<int>(min_u) - config_.init_padding);
            const int y0 = std::max(0, static_cast<int>(min_v) - config_.init_padding);
            const int x1 = std::min<int>(frame.width(),
                                         static_cast<int>(max_u) + config_.init_padding + 1);
            const int y1 = std::min<int>(frame.height(),
                                         static_cast<int>(max_v) + config_.init_padding + 1);
            Frame sub = extract_roi(frame, (x0 + x1) / 2.0, (y0 + y1) / 2.0,
                                    x1 - x0, y1 - y0);
            const int sub_x0 = x0;
            const int sub_y0 = y0;

            int max_count = 16;
            for (const auto& ms : markers_)
                max_count = std::max(
                    max_count, scale_superpixel_count(ms.frame_count, frame.width(),
                                                      frame.height(), sub.width(),
                                                      sub.height()));
            SlicParams params = config_.slic;
            params.n_superpixels = max_count;

            Segmentation seg;
            std::vector<Superpixel> stats;
            {
                StageScope scope(timing_.segmentation_s);
                seg = slic_segment(sub, params);
                stats = superpixel_stats(seg, sub);
            }

            std::vector<int> labels(n_markers);
            for (int m = 0; m < n_markers; ++m) {
                const Point2 click = *grid[t][cam][m];
                const int lx = std::clamp(static_cast<int>(std::lround(click.u)) - sub_x0,
                                          0, sub.width() - 1);
                const int ly = std::clamp(static_cast<int>(std::lround(click.v)) - sub_y0,
                                          0, sub.height() - 1);
                labels[m] = seg.label_at(lx, ly);
                for (int prev = 0; prev < m; ++prev)
                    if (labels[prev] == labels[m])
                        throw Error("clicks for markers '" + names[prev] + "' and '" +
                                    names[m] +
                                    "' land in the same superpixel; markers closer "
                                    "than ~10 px cannot be told apart");
                const Superpixel& sp = stats[labels[m]];
                detections[t][cam][m] = Point2{sp.cx + sub_x0, sp.cy + sub_y0};
                if (t == 0)
                    markers_[m].appearance_init[cam] = appearance_of(sp);
                else
                    markers_[m].appearance_prev[cam] = appearance_of(sp);
            }
        }
    }

    trajectory_ = Trajectory{};
    trajectory_.marker_names = names;
    trajectory_.n_cameras = n_cameras_;

    for (int m = 0; m < n_markers; ++m) {
        MarkerState& state = markers_[m];
        for (int cam = 0; cam < n_cameras_; ++cam) {
            state.last_2d[cam] = detections[1][cam][m];
            state.velocity_2d[cam] =
                Point2{detections[1][cam][m].u - detections[0][cam][m].u,
                       detections[1][cam][m].v - detections[0][cam][m].v};
        }

        std::optional<Point3> p0;
        std::optional<Point3> p1;
        if (config_.mode == TrackerConfig::Mode::ThreeD) {
            StageScope scope(timing_.geometry_s);
            std::vector<Observation> obs0, obs1;
            for (int cam = 0; cam < n_cameras_; ++cam) {
                obs0.push_back({cameras_[cam], detections[0][cam][m]});
                obs1.push_back({cameras_[cam], detections[1][cam][m]});
            }
            p0 = triangulate(obs0);
            p1 = triangulate(obs1);
            state.kalman.emplace(*p0, *p1, config_.kalman);
        }

        for (int t = 0; t < 2; ++t) {
            TrajectoryRecord rec;
            rec.frame = t;
            rec.marker = m;
            rec.status = TrackStatus::Tracked;
            rec.score = 0.0;
            for (int cam = 0; cam < n_cameras_; ++cam)
                rec.image_points.emplace_back(detections[t][cam][m]);
            rec.world_point = t == 0 ? p0 : p1;
            trajectory_.records.push_back(std::move(rec));
        }
    }
    // Records were appended marker-major for frames 0..1; keep frame-major order.
    std::stable_sort(trajectory_.records.begin(), trajectory_.records.end(),
                     [](const TrajectoryRecord& a, const TrajectoryRecord& b) {
                         return a.frame < b.frame;
                     });
    initialized_ = true;
}

Tracker::CameraMatch Tracker::match_in_camera(const Frame& frame, int cam,
                                              MarkerState& marker,
                                              const Point2& predicted) {
    CameraMatch result;
    Roi roi;
    Frame sub;
    Segmentation seg;
    std::vector<Superpixel> stats;
    {
        StageScope scope(timing_.segmentation_s);
        sub = extract_roi(frame, predicted.u, predicted.v, config_.roi_w,
                          config_.roi_h, &roi);
        SlicParams params = config_.slic;
        params.n_superpixels =
            scale_superpixel_count(marker.frame_count, frame.width(),
                                   frame.height(), sub.width(), sub.height());
        seg = slic_segment(sub, params);
        stats = superpixel_stats(seg, sub);
    }

    StageScope scope(timing_.matching_s);
    const Point2 predicted_local{predicted.u - roi.x0, predicted.v - roi.y0};
    std::vector<FeatureVector> features;
    features.reserve(stats.size());
    for (const auto& sp : stats)
        features.push_back(extract_features(sp, marker.appearance_prev[cam],
                                            marker.appearance_init[cam],
                                            predicted_local));
    const Selection sel = select_best(features, config_.weights);
    const FeatureVector& raw = features[sel.index];
    if (!gate_accepts(raw, config_.gate))
        return result;

    const Superpixel& sp = stats[sel.index];
    result.accepted = true;
    result.detection = Point2{sp.cx + roi.x0, sp.cy + roi.y0};
    result.score = sel.score;
    result.appearance = appearance_of(sp);
    return result;
}

void Tracker::step_3d(const std::vector<Frame>& frames) {
    const int frame_no = frames[0].index();
    for (std::size_t m = 0; m < markers_.size(); ++m) {
        MarkerState& marker = markers_[m];
        Point3 predicted3;
        {
            StageScope scope(timing_.geometry_s);
            predicted3 = marker.kalman->predict();
        }

        std::vector<std::optional<Point2>> projections(n_cameras_);
        bool projectable = true;
        {
            StageScope scope(timing_.geometry_s);
            for (int cam = 0; cam < n_cameras_; ++cam) {
                try {
                    const Point2 p = project(cameras_[cam], predicted3);
                    projections[cam] = p;
                    if (!inside_frame(p, frames[cam].width(), frames[cam].height()))
                        projectable = false;
                } catch (const DegenerateError&) {
                    projectable = false;
                }
            }
        }

        bool accepted = projectable;
        std::vector<CameraMatch> matches(n_cameras_);
        if (projectable) {
            for (int cam = 0; cam < n_cameras_ && accepted; ++cam) {
                matches[cam] =
                    match_in_camera(frames[cam], cam, marker, *projections[cam]);
                accepted = matches[cam].accepted;
            }
        }

        TrajectoryRecord rec;
        rec.frame = frame_no;
        rec.marker = static_cast<int>(m);
        if (accepted) {
            Point3 measured;
            {
                StageScope scope(timing_.geometry_s);
                std::vector<Observation> obs;
                obs.reserve(n_cameras_);
                for (int cam = 0; cam < n_cameras_; ++cam)
                    obs.push_back({cameras_[cam], matches[cam].detection});
                measured = triangulate(obs);
                marker.kalman->update(measured);
            }
            double score = 0;
            for (int cam = 0; cam < n_cameras_; ++cam) {
                marker.appearance_prev[cam] = matches[cam].appearance;
                marker.last_2d[cam] = matches[cam].detection;
                rec.image_points.emplace_back(matches[cam].detection);
                score += matches[cam].score;
            }
            marker.coast_count = 0;
            rec.world_point = measured;
            rec.score = score / n_cameras_;
            rec.status = TrackStatus::Tracked;
        } else {
            marker.coast_count += 1;
            rec.status = marker.coast_count > config_.loss_frames
                             ? TrackStatus::Lost
                             : TrackStatus::Coasting;
            rec.image_points = projections;
            rec.world_point = predicted3;
        }
        trajectory_.records.push_back(std::move(rec));
    }
}

void Tracker::step_2d(const std::vector<Frame>& frames) {
    const int frame_no = frames[0].index();
    for (std::size_t m = 0; m < markers_.size(); ++m) {
        MarkerState& marker = markers_[m];
        TrajectoryRecord rec;
        rec.frame = frame_no;
        rec.marker = static_cast<int>(m);

        int n_accepted = 0;
        double score = 0;
        for (int cam = 0; cam < n_cameras_; ++cam) {
            const Point2 predicted{marker.last_2d[cam].u + marker.velocity_2d[cam].u,
                                   marker.last_2d[cam].v + marker.velocity_2d[cam].v};
            if (!inside_frame(predicted, frames[cam].width(), frames[cam].height())) {
                rec.image_points.emplace_back(std::nullopt);
                continue;
            }
            const CameraMatch match =
                match_in_camera(frames[cam], cam, marker, predicted);
            if (match.accepted) {
                marker.velocity_2d[cam] =
                    Point2{match.detection.u - marker.last_2d[cam].u,
                           match.detection.v - marker.last_2d[cam].v};
                marker.last_2d[cam] = match.detection;
                marker.appearance_prev[cam] = match.appearance;
                rec.image_points.emplace_back(match.detection);
                score += match.score;
                ++n_accepted;
            } else {
                // Coast this camera on its constant-velocity estimate.
                marker.last_2d[cam] = predicted;
                rec.image_points.emplace_back(predicted);
            }
        }

        if (n_accepted == n_cameras_) {
            marker.coast_count = 0;
            rec.status = TrackStatus::Tracked;
            rec.score = score / n_cameras_;
        } else {
            marker.coast_count += 1;
            rec.status = marker.coast_count > config_.loss_frames
                             ? TrackStatus::Lost
                             : TrackStatus::Coasting;
        }
        trajectory_.records.push_back(std::move(rec));
    }
}

void Tracker::step(const std::vector<Frame>& frames) {
    if (!initialized_)
        throw std::logic_error("Tracker::step before initialize");
    if (static_cast<int>(frames.size()) != n_cameras_)
        throw std::invalid_argument("step: frame count does not match cameras");
    if (config_.mode == TrackerConfig::Mode::ThreeD)
        step_3d(frames);
    else
        step_2d(frames);
}

namespace {

TrackResult run_impl(const std::vector<FrameSource*>& sources,
                     const std::vector<CameraModel>& cameras,
                     const std::vector<Click>& clicks,
                     const TrackerConfig& config) {
    if (sources.empty())
        throw std::invalid_argument("no frame sources");
    const int n_frames = sources[0]->frame_count();
    for (const auto* src : sources)
        if (src->frame_count() != n_frames)
            throw CoverageError("camera sequences have different lengths");
    if (n_frames < 2)
        throw CoverageError("initialization needs at least 2 frames");

    Tracker tracker(cameras, config);
    const auto t0 = Clock::now();

    std::vector<Frame> frames0, frames1;
    {
        StageScope scope(tracker.timing().io_s);
        for (auto* src : sources)
            frames0.push_back(src->frame(0));
        for (auto* src : sources)
            frames1.push_back(src->frame(1));
    }
    tracker.initialize(frames0, frames1, clicks);

    for (int n = 2; n < n_frames; ++n) {
        std::vector<Frame> frames;
        {
            StageScope scope(tracker.timing().io_s);
            for (auto* src : sources)
                frames.push_back(src->frame(n));
        }
        tracker.step(frames);
    }

    tracker.timing().total_s =
        std::chrono::duration<double>(Clock::now() - t0).count();
    return TrackResult{tracker.trajectory(), tracker.timing()};
}

} // namespace

TrackResult run_tracker(const std::vector<FrameSource*>& sources,
                        const std::vector<CameraModel>& cameras,
                        const std::vector<Click>& clicks,
                        const TrackerConfig& config) {
    TrackerConfig cfg = config;
    cfg.mode = TrackerConfig::Mode::ThreeD;
    return run_impl(sources, cameras, clicks, cfg);
}

TrackResult run_2d_baseline(const std::vector<FrameSource*>& sources,
                            const std::vector<Click>& clicks,
                            const TrackerConfig& config) {
    TrackerConfig cfg = config;
    cfg.mode = TrackerConfig::Mode::TwoDBaseline;
    return run_impl(sources, {}, clicks, cfg);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << "frame,marker";
    for (int cam = 0; cam < traj.n_cameras; ++cam)
        out << ",cam" << cam << "_u,cam" << cam << "_v";
    out << ",x,y,z,score,status\n";
    out.precision(17);
    for (const auto& rec : traj.records) {
        out << rec.frame << "," << traj.marker_names[rec.marker];
        for (int cam = 0; cam < traj.n_cameras; ++cam) {
            if (rec.image_points[cam])
                out << "," << rec.image_points[cam]->u << ","
                    << rec.image_points[cam]->v;
            else
                out << ",,";
        }
        if (rec.world_point)
            out << "," << rec.world_point->x << "," << rec.world_point->y << ","
                << rec.world_point->z;
        else
            out << ",,,";
        if (rec.score)
            out << "," << *rec.score;
        else
            out << ",";
        out << "," << to_string(rec.status) << "\n";
    }
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingInputError("cannot open " + path);
    std::string header;
    if (!std::getline(in, header))
        throw ParseError("empty trajectory file " + path);
    const auto head = csv_split(header);
    int n_cameras = 0;
    for (const auto& field : head)
        if (field.rfind("cam", 0) == 0 && field.find("_u") != std::string::npos)
            ++n_cameras;
    if (head.size() != 2 + 2 * static_cast<std::size_t>(n_cameras) + 5)
        throw ParseError("unexpected trajectory header in " + path);

    Trajectory traj;
    traj.n_cameras = n_cameras;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto row = csv_split(line);
        if (row.size() != head.size())
            throw ParseError("wrong field count at " + where);
        TrajectoryRecord rec;
        rec.frame = static_cast<int>(csv_to_long(row[0], where));
        const std::string& name = row[1];
        auto it = std::find(traj.marker_names.begin(), traj.marker_names.end(), name);
        if (it == traj.marker_names.end()) {
            traj.marker_names.push_back(name);
            it = std::prev(traj.marker_names.end());
        }
        rec.marker = static_cast<int>(it - traj.marker_names.begin());
        std::size_t col = 2;
        for (int cam = 0; cam < n_cameras; ++cam, col += 2) {
            if (!row[col].empty() && !row[col + 1].empty())
                rec.image_points.emplace_back(
                    Point2{csv_to_double(row[col], where),
                           csv_to_double(row[col + 1], where)});
            else
                rec.image_points.emplace_back(std::nullopt);
        }
        if (!row[col].empty() && !row[col + 1].empty() && !row[col + 2].empty())
            rec.world_point = Point3{csv_to_double(row[col], where),
                                     csv_to_double(row[col + 1], where),
                                     csv_to_double(row[col + 2], where)};
        col += 3;
        if (!row[col].empty())
            rec.score = csv_to_double(row[col], where);
        ++col;
        rec.status = track_status_from_string(row[col]);
        traj.records.push_back(std::move(rec));
    }
    return traj;
}

} // namespace spx
