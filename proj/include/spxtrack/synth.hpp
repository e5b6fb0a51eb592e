#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spxtrack/frame.hpp"
#include "spxtrack/geometry.hpp"
#include "spxtrack/tracker.hpp"

namespace spx {

struct MarkerSpec {
    std::string name;
    double radius_px = 6.0;
    std::array<std::uint8_t, 3> color{230, 60, 50};
    enum class Motion { ConstantVelocity, Gait } motion = Motion::Gait;
    Point3 start{};
    Point3 velocity{}; // object units per frame
    double gait_amplitude = 0; // vertical sinusoid, object units
    double gait_period = 40;   // frames
    double phase = 0;          // radians
};

struct EventSpec {
    enum class Type { OcclusionFull, OcclusionPartial, BadMarker, MissingStart } type;
    int marker = 0; // index into Scenario::markers
    int from = 0;   // inclusive frame span
    int to = 0;
};

struct Scenario {
    int n_frames = 200;
    int width = 2048;
    int height = 700;
    std::uint64_t seed = 0;
    double noise_sigma = 0;
    std::array<std::uint8_t, 3> background{200, 200, 200};
    std::vector<MarkerSpec> markers;
    std::vector<EventSpec> events;
    std::vector<CameraModel> cameras; // empty -> default stereo pair

    static Scenario from_json(const std::string& text);
    static Scenario from_json_file(const std::filesystem::path& path);
};

// Two same-side DLT cameras arranged to cover the default working volume
// (x 0..400, y -40..40, z 0..160 object units) at the given frame size.
std::vector<CameraModel> make_default_cameras(int width, int height);

// Five gait-like markers, no events; the base scene for trials.
Scenario make_gait_scenario(int n_frames, int width, int height, std::uint64_t seed);

enum class Condition { Perfect, BadMarker, MissingStart, PartialOcclusion, FullOcclusion };
std::string to_string(Condition c);
Condition condition_from_string(const std::string& s);

struct TruthRecord {
    int frame = 0;
    int marker = 0;
    Point3 world;
    std::vector<Point2> image_points; // per camera
    std::vector<bool> visible;        // per camera
    Condition condition = Condition::Perfect;
};

struct GroundTruth {
    std::vector<std::string> marker_names;
    std::vector<double> marker_radius_px;
    int n_cameras = 0;
    int n_frames = 0;
    std::vector<TruthRecord> records; // frame-major

    const TruthRecord& at(int frame, int marker) const {
        return records[static_cast<std::size_t>(frame) * marker_names.size() + marker];
    }
};

// Evaluates trajectories and projections for every frame; rejects scenarios
// whose markers leave a camera view with no declaring event.
GroundTruth make_ground_truth(const Scenario& scenario);

// Renders one camera frame: background, optional per-pixel Gaussian noise,
// anti-aliased marker discs, then event occluders. Deterministic per
// (seed, camera, frame).
Frame render_frame(const Scenario& scenario, const GroundTruth& truth, int cam,
                   int frame);

// Initialization clicks derived from the frame-0/1 ground truth.
std::vector<Click> clicks_from_truth(const GroundTruth& truth);

// Renders frames on demand so trials need not touch the filesystem.
class ScenarioFrameSource : public FrameSource {
public:
    ScenarioFrameSource(const Scenario& scenario, const GroundTruth& truth, int cam)
        : scenario_(&scenario), truth_(&truth), cam_(cam) {}
    int frame_count() const override { return scenario_->n_frames; }
    int width() const override { return scenario_->width; }
    int height() const override { return scenario_->height; }
    Frame frame(int n) override { return render_frame(*scenario_, *truth_, cam_, n); }

private:
    const Scenario* scenario_;
    const GroundTruth* truth_;
    int cam_;
};

void write_truth_csv(const std::string& path, const GroundTruth& truth);
GroundTruth read_truth_csv(const std::string& path);

// cam<K>/cam<K>_<NNNNNN>.<ext> sequences plus truth.csv, clicks.csv and
// cameras.csv under out_dir.
void generate_scene(const Scenario& scenario, const std::filesystem::path& out_dir,
                    bool png = false);

struct ConditionStats {
    long frames = 0;        // distinct frames carrying the condition
    long marker_frames = 0; // marker-frame count
    long correct = 0;
    double percentage() const {
        return marker_frames > 0 ? 100.0 * correct / marker_frames : 0.0;
    }
};

struct EvalReport {
    double tol_px = 10;
    double units_per_px = 1.0; // object units per image pixel, estimated
    std::map<Condition, ConditionStats> by_condition;
    ConditionStats total; // all conditions except missing start, as in the
                          // original study's comprehensive row
    long occlusion_events = 0;
    long reacquired_events = 0; // tracked again within 3 frames at tolerance
};

// A marker-frame is correct when the tracked 2D point lies within tol_px of
// truth in every camera that sees the marker; frames under full occlusion
// are correct only when the tracker coasts with 3D error below 5x the
// marker radius.
EvalReport evaluate(const Trajectory& trajectory, const GroundTruth& truth,
                    double tol_px);

// Human-readable table; includes the original study's reference
// percentages, labeled as context that synthetic scenes cannot reproduce.
std::string format_report(const EvalReport& report);
void write_report_csv(const std::string& path, const EvalReport& report);

} // namespace spx
