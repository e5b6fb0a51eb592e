#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spxtrack/config.hpp"
#include "spxtrack/demosaic.hpp"
#include "spxtrack/frame.hpp"
#include "spxtrack/geometry.hpp"
#include "spxtrack/kalman3d.hpp"
#include "spxtrack/matcher.hpp"
#include "spxtrack/slic.hpp"

namespace spx {

// A per-camera sequence of frames, loaded or rendered on demand.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual int frame_count() const = 0;
    virtual int width() const = 0;
    virtual int height() const = 0;
    virtual Frame frame(int n) = 0;
};

// Reads cam<K>_<NNNNNN>.<ext> image files from a directory; single-plane
// inputs are demosaiced when a Bayer pattern is given.
class DirectoryFrameSource : public FrameSource {
public:
    DirectoryFrameSource(const std::filesystem::path& dir, int cam_id,
                         std::optional<BayerPattern> bayer = std::nullopt);
    int frame_count() const override { return static_cast<int>(files_.size()); }
    int width() const override { return width_; }
    int height() const override { return height_; }
    Frame frame(int n) override;

private:
    std::vector<std::filesystem::path> files_;
    std::optional<BayerPattern> bayer_;
    int width_ = 0;
    int height_ = 0;
};

// One user click: marker position in one camera of one initialization frame.
struct Click {
    int frame = 0;
    int cam_id = 0;
    std::string marker;
    double u = 0;
    double v = 0;
};

std::vector<Click> read_clicks_csv(const std::string& path);
void write_clicks_csv(const std::string& path, const std::vector<Click>& clicks);

enum class TrackStatus { Tracked, Coasting, Lost };
std::string to_string(TrackStatus status);
TrackStatus track_status_from_string(const std::string& s);

struct TrajectoryRecord {
    int frame = 0;
    int marker = 0; // index into Trajectory::marker_names
    std::vector<std::optional<Point2>> image_points; // per camera
    std::optional<Point3> world_point; // triangulated, or extrapolated while coasting
    std::optional<double> score;       // weighted mismatch of the accepted match
    TrackStatus status = TrackStatus::Tracked;
};

struct Trajectory {
    std::vector<std::string> marker_names;
    int n_cameras = 0;
    std::vector<TrajectoryRecord> records; // frame-major, marker order within frame
};

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

struct TrackerConfig {
    int roi_w = 100;
    int roi_h = 100;
    int init_padding = 100;
    int loss_frames = 25; // consecutive coasts before a track counts as lost
    enum class Mode { ThreeD, TwoDBaseline } mode = Mode::ThreeD;
    SlicParams slic;           // n_superpixels is driven per marker
    int default_count = 10000; // full-frame superpixel count
    std::map<std::string, int> marker_counts; // per-marker overrides
    Weights weights;
    MatchGate gate;
    KalmanConfig kalman;

    static TrackerConfig from_config(const Config& config);
};

struct StageTiming {
    double segmentation_s = 0;
    double matching_s = 0;
    double geometry_s = 0;
    double io_s = 0;
    double total_s = 0;
    std::string table() const; // plain-text stage table
};

// The per-frame pipeline: predict in 3D, project per camera, segment the
// ROI, score superpixels, triangulate accepted detections, update the
// filter; or the per-camera 2D baseline with a constant-velocity estimate.
class Tracker {
public:
    Tracker(std::vector<CameraModel> cameras, TrackerConfig config);

    // Frames 0 and 1 of every camera plus the two click rows per camera per
    // marker. Seeds appearances and the motion state.
    void initialize(const std::vector<Frame>& frames0,
                    const std::vector<Frame>& frames1,
                    const std::vector<Click>& clicks);

    // One frame per camera, same index n >= 2.
    void step(const std::vector<Frame>& frames);

    bool initialized() const { return initialized_; }
    int n_markers() const { return static_cast<int>(markers_.size()); }
    const Trajectory& trajectory() const { return trajectory_; }
    StageTiming& timing() { return timing_; }

private:
    struct MarkerState {
        std::string name;
        int frame_count = 0; // full-frame superpixel count for this marker
        std::optional<Kalman3D> kalman;
        std::vector<MarkerAppearance> appearance_init;
        std::vector<MarkerAppearance> appearance_prev;
        std::vector<Point2> last_2d;
        std::vector<Point2> velocity_2d;
        int coast_count = 0;
    };

    struct CameraMatch {
        bool accepted = false;
        Point2 detection;
        double score = 0;
        MarkerAppearance appearance;
    };

    CameraMatch match_in_camera(const Frame& frame, int cam, MarkerState& marker,
                                const Point2& predicted);
    void step_3d(const std::vector<Frame>& frames);
    void step_2d(const std::vector<Frame>& frames);

    std::vector<CameraModel> cameras_;
    TrackerConfig config_;
    std::vector<MarkerState> markers_;
    Trajectory trajectory_;
    StageTiming timing_;
    bool initialized_ = false;
    int n_cameras_ = 0;
};

struct TrackResult {
    Trajectory trajectory;
    StageTiming timing;
};

// Full trial: initialization from clicks on frames 0..1, then the general
// tracker over the remaining frames. Calibration time is not part of the
// timing report; camera models come in precomputed.
TrackResult run_tracker(const std::vector<FrameSource*>& sources,
                        const std::vector<CameraModel>& cameras,
                        const std::vector<Click>& clicks,
                        const TrackerConfig& config);

// Per-camera 2D tracking without triangulation; accepts a single camera.
TrackResult run_2d_baseline(const std::vector<FrameSource*>& sources,
                            const std::vector<Click>& clicks,
                            const TrackerConfig& config);

} // namespace spx
