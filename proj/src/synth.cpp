#include "spxtrack/synth.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "spxtrack/csv.hpp"
#include "spxtrack/error.hpp"
#include "spxtrack/image_io.hpp"

namespace spx {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw ParseError("unknown scenario key '" + item.key() + "' in " + where);
}

std::array<std::uint8_t, 3> parse_color(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw ParseError("expected [r,g,b] for " + where);
    std::array<std::uint8_t, 3> out{};
    for (int i = 0; i < 3; ++i) {
        const double v = j[i].get<double>();
        if (v < 0 || v > 255)
            throw ParseError("color channel out of range in " + where);
        out[i] = static_cast<std::uint8_t>(v);
    }
    return out;
}

Point3 parse_point3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw ParseError("expected [x,y,z] for " + where);
    return Point3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

CameraModel make_pinhole(int id, const Eigen::Vector3d& position,
                         const Eigen::Vector3d& target, double focal_px,
                         double cx, double cy) {
    const Eigen::Vector3d up(0, 0, 1);
    const Eigen::Vector3d zc = (target - position).normalized();
    const Eigen::Vector3d xc = zc.cross(up).normalized();
    const Eigen::Vector3d yc = zc.cross(xc); // image v grows downward
    Eigen::Matrix3d rot;
    rot.row(0) = xc;
    rot.row(1) = yc;
    rot.row(2) = zc;
    Eigen::Matrix3d intr;
    intr << focal_px, 0, cx, 0, focal_px, cy, 0, 0, 1;
    Eigen::Matrix<double, 3, 4> rt;
    rt.leftCols<3>() = rot;
    rt.col(3) = -rot * position;
    Eigen::Matrix<double, 3, 4> p = intr * rt;
    p /= p(2, 3);
    CameraModel cam;
    cam.id = id;
    cam.coeffs = {p(0, 0), p(0, 1), p(0, 2), p(0, 3), p(1, 0), p(1, 1),
                  p(1, 2), p(1, 3), p(2, 0), p(2, 1), p(2, 2)};
    return cam;
}

std::vector<CameraModel> scenario_cameras(const Scenario& s) {
    if (!s.cameras.empty())
        return s.cameras;
    return make_default_cameras(s.width, s.height);
}

Point3 marker_position(const MarkerSpec& m, int frame) {
    Point3 p{m.start.x + m.velocity.x * frame, m.start.y + m.velocity.y * frame,
             m.start.z + m.velocity.z * frame};
    if (m.motion == MarkerSpec::Motion::Gait)
        p.z += m.gait_amplitude *
               std::sin(2.0 * std::numbers::pi * frame / m.gait_period + m.phase);
    return p;
}

// Deterministic per-stream Gaussian noise (splitmix64 + Box-Muller), so
// identical seeds give byte-identical frames on every platform.
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, std::uint64_t cam, std::uint64_t frame) {
        state_ = seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL * (cam + 1) +
                 0x8CB92BA72F3D8DD7ULL * (frame + 1);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0,1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    double uniform() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

    std::uint64_t state_ = 0;
    double spare_ = 0;
    bool have_spare_ = false;
};

void draw_disc(Frame& frame, double cu, double cv, double radius,
               const std::array<std::uint8_t, 3>& color) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cu - radius - 1)));
    const int x1 = std::min(frame.width() - 1, static_cast<int>(std::ceil(cu + radius + 1)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cv - radius - 1)));
    const int y1 = std::min(frame.height() - 1, static_cast<int>(std::ceil(cv + radius + 1)));
    const double r2 = radius * radius;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            int covered = 0;
            for (int sy = 0; sy < 4; ++sy) {
                for (int sx = 0; sx < 4; ++sx) {
                    const double px = x + (sx + 0.5) / 4.0 - 0.5 - cu;
                    const double py = y + (sy + 0.5) / 4.0 - 0.5 - cv;
                    if (px * px + py * py <= r2)
                        ++covered;
                }
            }
            if (covered == 0)
                continue;
            const double alpha = covered / 16.0;
            const auto blend = [&](std::uint8_t base, std::uint8_t over) {
                return static_cast<std::uint8_t>(
                    std::lround(base * (1.0 - alpha) + over * alpha));
            };
            frame.set_rgb(x, y, blend(frame.r(x, y), color[0]),
                          blend(frame.g(x, y), color[1]),
                          blend(frame.b(x, y), color[2]));
        }
    }
}

std::array<std::uint8_t, 3> fade_toward(const std::array<std::uint8_t, 3>& color,
                                        const std::array<std::uint8_t, 3>& bg,
                                        double keep) {
    std::array<std::uint8_t, 3> out{};
    for (int c = 0; c < 3; ++c)
        out[c] = static_cast<std::uint8_t>(
            std::lround(color[c] * keep + bg[c] * (1.0 - keep)));
    return out;
}

constexpr std::array<std::uint8_t, 3> kOccluderColor{128, 128, 128};

// Reference percentages of the original rat-data study (SLIC + 3D column);
// context only, synthetic scenes cannot reproduce them.
constexpr double kRefBad = 85.79;
constexpr double kRefMissing = 11.99;
constexpr double kRefPartial = 94.28;
constexpr double kRefOccluded = 89.36;
constexpr double kRefPerfect = 99.99;
constexpr double kRefTotal = 95.01;
const char* kRefTiming = "149 +/- 18 s";

double reference_pct(Condition c) {
    switch (c) {
    case Condition::BadMarker:
        return kRefBad;
    case Condition::MissingStart:
        return kRefMissing;
    case Condition::PartialOcclusion:
        return kRefPartial;
    case Condition::FullOcclusion:
        return kRefOccluded;
    case Condition::Perfect:
        return kRefPerfect;
    }
    return 0;
}

const std::vector<Condition>& condition_order() {
    static const std::vector<Condition> order = {
        Condition::BadMarker, Condition::MissingStart, Condition::PartialOcclusion,
        Condition::FullOcclusion, Condition::Perfect};
    return order;
}

} // namespace

std::string to_string(Condition c) {
    switch (c) {
    case Condition::Perfect:
        return "perfect";
    case Condition::BadMarker:
        return "bad_marker";
    case Condition::MissingStart:
        return "missing_start";
    case Condition::PartialOcclusion:
        return "partially_occluded";
    case Condition::FullOcclusion:
        return "occluded";
    }
    return "?";
}

Condition condition_from_string(const std::string& s) {
    if (s == "perfect")
        return Condition::Perfect;
    if (s == "bad_marker")
        return Condition::BadMarker;
    if (s == "missing_start")
        return Condition::MissingStart;
    if (s == "partially_occluded")
        return Condition::PartialOcclusion;
    if (s == "occluded")
        return Condition::FullOcclusion;
    throw ParseError("unknown condition '" + s + "'");
}

std::vector<CameraModel> make_default_cameras(int width, int height) {
    const Eigen::Vector3d target(200, 0, 80);
    const double focal = 2.6 * width;
    return {make_pinhole(0, Eigen::Vector3d(40, -1150, 105), target, focal,
                         width / 2.0, height / 2.0),
            make_pinhole(1, Eigen::Vector3d(360, -1150, 105), target, focal,
                         width / 2.0, height / 2.0)};
}

Scenario Scenario::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario JSON: ") + e.what());
    }
    require_keys(j,
                 {"frames", "width", "height", "seed", "noise_sigma", "background",
                  "markers", "events", "cameras"},
                 "scenario");

    Scenario s;
    s.n_frames = j.value("frames", s.n_frames);
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.seed = j.value("seed", s.seed);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    if (j.contains("background"))
        s.background = parse_color(j["background"], "background");
    if (s.n_frames < 2 || s.width < 8 || s.height < 8)
        throw ParseError("scenario: frames/width/height too small");

    if (!j.contains("markers") || !j["markers"].is_array() || j["markers"].empty())
        throw ParseError("scenario: needs a markers array");
    for (const auto& jm : j["markers"]) {
        require_keys(jm,
                     {"name", "radius_px", "color", "motion", "start", "velocity",
                      "gait_amplitude", "gait_period", "phase"},
                     "marker");
        MarkerSpec m;
        m.name = jm.at("name").get<std::string>();
        m.radius_px = jm.value("radius_px", m.radius_px);
        if (jm.contains("color"))
            m.color = parse_color(jm["color"], "marker " + m.name);
        const std::string motion = jm.value("motion", std::string("gait"));
        if (motion == "gait")
            m.motion = MarkerSpec::Motion::Gait;
        else if (motion == "constant")
            m.motion = MarkerSpec::Motion::ConstantVelocity;
        else
            throw ParseError("marker motion must be gait or constant");
        if (jm.contains("start"))
            m.start = parse_point3(jm["start"], "marker start");
        if (jm.contains("velocity"))
            m.velocity = parse_point3(jm["velocity"], "marker velocity");
        m.gait_amplitude = jm.value("gait_amplitude", m.gait_amplitude);
        m.gait_period = jm.value("gait_period", m.gait_period);
        m.phase = jm.value("phase", m.phase);
        if (m.radius_px < 1 || m.gait_period <= 0)
            throw ParseError("marker " + m.name + ": bad radius or period");
        s.markers.push_back(std::move(m));
    }

    if (j.contains("events")) {
        for (const auto& je : j["events"]) {
            require_keys(je, {"type", "marker", "from", "to"}, "event");
            EventSpec e;
            const std::string type = je.at("type").get<std::string>();
            if (type == "occlusion_full")
                e.type = EventSpec::Type::OcclusionFull;
            else if (type == "occlusion_partial")
                e.type = EventSpec::Type::OcclusionPartial;
            else if (type == "bad_marker")
                e.type = EventSpec::Type::BadMarker;
            else if (type == "missing_start")
                e.type = EventSpec::Type::MissingStart;
            else
                throw ParseError("unknown event type '" + type + "'");
            const json& jmarker = je.at("marker");
            if (jmarker.is_string()) {
                const std::string name = jmarker.get<std::string>();
                const auto it = std::find_if(
                    s.markers.begin(), s.markers.end(),
                    [&](const MarkerSpec& m) { return m.name == name; });
                if (it == s.markers.end())
                    throw ParseError("event references unknown marker '" + name + "'");
                e.marker = static_cast<int>(it - s.markers.begin());
            } else {
                e.marker = jmarker.get<int>();
            }
            e.from = je.at("from").get<int>();
            e.to = je.at("to").get<int>();
            if (e.marker < 0 || e.marker >= static_cast<int>(s.markers.size()))
                throw ParseError("event marker index out of range");
            if (e.from < 0 || e.to < e.from || e.to >= s.n_frames)
                throw ParseError("event frame span out of range");
            if (e.type == EventSpec::Type::MissingStart && e.from != 0)
                throw ParseError("missing_start events must begin at frame 0");
            s.events.push_back(e);
        }
    }

    if (j.contains("cameras") && !j["cameras"].is_string()) {
        for (const auto& jc : j["cameras"]) {
            if (!jc.is_array() || jc.size() != 11)
                throw ParseError("camera entries must be 11 DLT coefficients");
            CameraModel cam;
            cam.id = static_cast<int>(s.cameras.size());
            for (int i = 0; i < 11; ++i)
                cam.coeffs[i] = jc[i].get<double>();
            s.cameras.push_back(cam);
        }
        if (s.cameras.size() < 2)
            throw ParseError("scenario: needs at least 2 cameras");
    }
    return s;
}

Scenario Scenario::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingInputError("cannot open scenario " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

Scenario make_gait_scenario(int n_frames, int width, int height, std::uint64_t seed) {
    Scenario s;
    s.n_frames = n_frames;
    s.width = width;
    s.height = height;
    s.seed = seed;

    struct Spec {
        const char* name;
        std::array<std::uint8_t, 3> color;
        double z;
        double amplitude;
        double period;
    };
    const Spec specs[5] = {
        {"toe", {230, 50, 40}, 30, 5.0, 37},
        {"ankle", {60, 200, 70}, 55, 4.0, 41},
        {"knee", {50, 90, 230}, 82, 3.0, 47},
        {"hip", {235, 200, 40}, 110, 2.0, 53},
        {"asis", {200, 60, 200}, 135, 1.5, 59},
    };
    // Travel stays inside the default working volume for any frame count.
    const double travel = 160.0;
    for (int i = 0; i < 5; ++i) {
        MarkerSpec m;
        m.name = specs[i].name;
        m.color = specs[i].color;
        m.radius_px = 6.0;
        m.motion = MarkerSpec::Motion::Gait;
        m.start = Point3{90.0 + 12.0 * i, -12.0 + 6.0 * i, specs[i].z};
        m.velocity = Point3{travel / n_frames, 0, 0};
        m.gait_amplitude = specs[i].amplitude;
        m.gait_period = specs[i].period;
        m.phase = 0.9 * i + static_cast<double>(seed % 7) * 0.3;
        s.markers.push_back(std::move(m));
    }
    return s;
}

GroundTruth make_ground_truth(const Scenario& scenario) {
    const auto cameras = scenario_cameras(scenario);
    const int n_cams = static_cast<int>(cameras.size());
    const int n_markers = static_cast<int>(scenario.markers.size());

    GroundTruth truth;
    truth.n_cameras = n_cams;
    truth.n_frames = scenario.n_frames;
    for (const auto& m : scenario.markers) {
        truth.marker_names.push_back(m.name);
        truth.marker_radius_px.push_back(m.radius_px);
    }

    // Frame-by-frame condition, most severe event wins.
    const auto condition_at = [&](int marker, int frame) {
        Condition c = Condition::Perfect;
        for (const auto& e : scenario.events) {
            if (e.marker != marker || frame < e.from || frame > e.to)
                continue;
            switch (e.type) {
            case EventSpec::Type::MissingStart:
                return Condition::MissingStart;
            case EventSpec::Type::OcclusionFull:
                c = Condition::FullOcclusion;
                break;
            case EventSpec::Type::OcclusionPartial:
                if (c != Condition::FullOcclusion)
                    c = Condition::PartialOcclusion;
                break;
            case EventSpec::Type::BadMarker:
                if (c == Condition::Perfect)
                    c = Condition::BadMarker;
                break;
            }
        }
        return c;
    };

    truth.records.reserve(static_cast<std::size_t>(scenario.n_frames) * n_markers);
    for (int n = 0; n < scenario.n_frames; ++n) {
        for (int m = 0; m < n_markers; ++m) {
            TruthRecord rec;
            rec.frame = n;
            rec.marker = m;
            rec.world = marker_position(scenario.markers[m], n);
            rec.condition = condition_at(m, n);
            const bool hidden = rec.condition == Condition::MissingStart ||
                                rec.condition == Condition::FullOcclusion;
            const double r = scenario.markers[m].radius_px;
            for (int cam = 0; cam < n_cams; ++cam) {
                Point2 p;
                try {
                    p = project(cameras[cam], rec.world);
                } catch (const DegenerateError&) {
                    throw ParseError("scenario: marker '" + truth.marker_names[m] +
                                     "' projects at infinity in camera " +
                                     std::to_string(cam));
                }
                const bool in_view = p.u - r >= 0 && p.u + r <= scenario.width - 1 &&
                                     p.v - r >= 0 && p.v + r <= scenario.height - 1;
                if (!in_view && !hidden)
                    throw ParseError("scenario: marker '" + truth.marker_names[m] +
                                     "' leaves camera " + std::to_string(cam) +
                                     " view at frame " + std::to_string(n) +
                                     " with no declaring event");
                rec.image_points.push_back(p);
                rec.visible.push_back(!hidden && in_view);
            }
            truth.records.push_back(std::move(rec));
        }
    }
    return truth;
}

Frame render_frame(const Scenario& scenario, const GroundTruth& truth, int cam,
                   int frame) {
    Frame out(scenario.width, scenario.height, frame);
    const auto& bg = scenario.background;
    if (scenario.noise_sigma > 0) {
        NoiseStream noise(scenario.seed, static_cast<std::uint64_t>(cam),
                          static_cast<std::uint64_t>(frame));
        for (int y = 0; y < out.height(); ++y) {
            for (int x = 0; x < out.width(); ++x) {
                std::uint8_t px[3];
                for (int c = 0; c < 3; ++c) {
                    const double v = bg[c] + scenario.noise_sigma * noise.normal();
                    px[c] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
                }
                out.set_rgb(x, y, px[0], px[1], px[2]);
            }
        }
    } else {
        for (int y = 0; y < out.height(); ++y)
            for (int x = 0; x < out.width(); ++x)
                out.set_rgb(x, y, bg[0], bg[1], bg[2]);
    }

    const int n_markers = static_cast<int>(truth.marker_names.size());
    for (int m = 0; m < n_markers; ++m) {
        const TruthRecord& rec = truth.at(frame, m);
        if (rec.condition == Condition::MissingStart)
            continue;
        const MarkerSpec& spec = scenario.markers[m];
        std::array<std::uint8_t, 3> color = spec.color;
        double radius = spec.radius_px;
        if (rec.condition == Condition::BadMarker) {
            // Poorly painted: washed out and smaller, but still findable.
            color = fade_toward(color, bg, 0.65);
            radius *= 0.75;
        }
        const Point2& p = rec.image_points[cam];
        draw_disc(out, p.u, p.v, radius, color);
    }
    // Occluders go on top of everything.
    for (int m = 0; m < n_markers; ++m) {
        const TruthRecord& rec = truth.at(frame, m);
        const Point2& p = rec.image_points[cam];
        const double r = scenario.markers[m].radius_px;
        if (rec.condition == Condition::FullOcclusion)
            draw_disc(out, p.u, p.v, 2.0 * r, kOccluderColor);
        else if (rec.condition == Condition::PartialOcclusion)
            draw_disc(out, p.u + 0.9 * r, p.v, r, kOccluderColor);
    }
    return out;
}

std::vector<Click> clicks_from_truth(const GroundTruth& truth) {
    std::vector<Click> clicks;
    for (int t = 0; t < 2; ++t)
        for (int cam = 0; cam < truth.n_cameras; ++cam)
            for (std::size_t m = 0; m < truth.marker_names.size(); ++m) {
                const TruthRecord& rec = truth.at(t, static_cast<int>(m));
                clicks.push_back(Click{t, cam, truth.marker_names[m],
                                       rec.image_points[cam].u,
                                       rec.image_points[cam].v});
            }
    return clicks;
}

void write_truth_csv(const std::string& path, const GroundTruth& truth) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << "frame,marker,radius_px,x,y,z";
    for (int cam = 0; cam < truth.n_cameras; ++cam)
        out << ",cam" << cam << "_u,cam" << cam << "_v,cam" << cam << "_vis";
    out << ",condition\n";
    out.precision(17);
    for (const auto& rec : truth.records) {
        out << rec.frame << "," << truth.marker_names[rec.marker] << ","
            << truth.marker_radius_px[rec.marker] << "," << rec.world.x << ","
            << rec.world.y << "," << rec.world.z;
        for (int cam = 0; cam < truth.n_cameras; ++cam)
            out << "," << rec.image_points[cam].u << "," << rec.image_points[cam].v
                << "," << (rec.visible[cam] ? 1 : 0);
        out << "," << to_string(rec.condition) << "\n";
    }
}

GroundTruth read_truth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingInputError("cannot open " + path);
    std::string header;
    if (!std::getline(in, header))
        throw ParseError("empty truth file " + path);
    const auto head = csv_split(header);
    int n_cameras = 0;
    for (const auto& f : head)
        if (f.rfind("cam", 0) == 0 && f.find("_u") != std::string::npos)
            ++n_cameras;
    if (n_cameras < 1 || head.size() != 7 + 3 * static_cast<std::size_t>(n_cameras))
        throw ParseError("unexpected truth header in " + path);

    GroundTruth truth;
    truth.n_cameras = n_cameras;
    std::string line;
    std::size_t lineno = 1;
    std::vector<TruthRecord> records;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto row = csv_split(line);
        if (row.size() != head.size())
            throw ParseError("wrong field count at " + where);
        TruthRecord rec;
        rec.frame = static_cast<int>(csv_to_long(row[0], where));
        const std::string& name = row[1];
        auto it = std::find(truth.marker_names.begin(), truth.marker_names.end(), name);
        if (it == truth.marker_names.end()) {
            truth.marker_names.push_back(name);
            truth.marker_radius_px.push_back(csv_to_double(row[2], where));
            it = std::prev(truth.marker_names.end());
        }
        rec.marker = static_cast<int>(it - truth.marker_names.begin());
        rec.world = Point3{csv_to_double(row[3], where), csv_to_double(row[4], where),
                           csv_to_double(row[5], where)};
        std::size_t col = 6;
        for (int cam = 0; cam < n_cameras; ++cam, col += 3) {
            rec.image_points.push_back(Point2{csv_to_double(row[col], where),
                                              csv_to_double(row[col + 1], where)});
            rec.visible.push_back(csv_to_long(row[col + 2], where) != 0);
        }
        rec.condition = condition_from_string(row[col]);
        truth.n_frames = std::max(truth.n_frames, rec.frame + 1);
        records.push_back(std::move(rec));
    }

    const std::size_t n_markers = truth.marker_names.size();
    if (records.size() != static_cast<std::size_t>(truth.n_frames) * n_markers)
        throw CoverageError("truth file does not cover frames x markers: " + path);
    truth.records.resize(records.size());
    std::vector<bool> seen(records.size(), false);
    for (auto& rec : records) {
        const std::size_t slot = static_cast<std::size_t>(rec.frame) * n_markers +
                                 static_cast<std::size_t>(rec.marker);
        if (seen[slot])
            throw CoverageError("duplicate truth record in " + path);
        seen[slot] = true;
        truth.records[slot] = std::move(rec);
    }
    return truth;
}

void generate_scene(const Scenario& scenario, const std::filesystem::path& out_dir,
                    bool png) {
    const GroundTruth truth = make_ground_truth(scenario);
    const auto cameras = scenario_cameras(scenario);

    std::filesystem::create_directories(out_dir);
    for (int cam = 0; cam < truth.n_cameras; ++cam) {
        const auto cam_dir = out_dir / ("cam" + std::to_string(cam));
        std::filesystem::create_directories(cam_dir);
        for (int n = 0; n < scenario.n_frames; ++n) {
            const Frame frame = render_frame(scenario, truth, cam, n);
            char name[32];
            std::snprintf(name, sizeof(name), "cam%d_%06d.%s", cam, n,
                          png ? "png" : "ppm");
            if (png)
                write_png(cam_dir / name, frame);
            else
                write_ppm(cam_dir / name, frame);
        }
    }
    write_truth_csv((out_dir / "truth.csv").string(), truth);
    write_clicks_csv((out_dir / "clicks.csv").string(), clicks_from_truth(truth));
    write_cameras_csv((out_dir / "cameras.csv").string(), cameras);
}

EvalReport evaluate(const Trajectory& trajectory, const GroundTruth& truth,
                    double tol_px) {
    if (trajectory.n_cameras != truth.n_cameras)
        throw CoverageError("trajectory and truth disagree on camera count");
    const int n_markers = static_cast<int>(truth.marker_names.size());

    // Map trajectory marker ids onto truth marker ids by name.
    std::vector<int> to_truth(trajectory.marker_names.size(), -1);
    for (std::size_t i = 0; i < trajectory.marker_names.size(); ++i) {
        const auto it = std::find(truth.marker_names.begin(), truth.marker_names.end(),
                                  trajectory.marker_names[i]);
        if (it == truth.marker_names.end())
            throw CoverageError("trajectory marker '" + trajectory.marker_names[i] +
                                "' not in truth");
        to_truth[i] = static_cast<int>(it - truth.marker_names.begin());
    }

    std::vector<const TrajectoryRecord*> lookup(
        static_cast<std::size_t>(truth.n_frames) * n_markers, nullptr);
    for (const auto& rec : trajectory.records) {
        if (rec.frame < 0 || rec.frame >= truth.n_frames)
            throw CoverageError("trajectory frame " + std::to_string(rec.frame) +
                                " outside truth range");
        const std::size_t slot = static_cast<std::size_t>(rec.frame) * n_markers +
                                 to_truth[rec.marker];
        if (lookup[slot])
            throw CoverageError("duplicate trajectory record at frame " +
                                std::to_string(rec.frame));
        lookup[slot] = &rec;
    }
    for (std::size_t i = 0; i < lookup.size(); ++i)
        if (!lookup[i])
            throw CoverageError("trajectory does not cover every marker-frame");

    // Object units per pixel, estimated from truth's own inter-frame motion.
    std::vector<double> ratios;
    for (int m = 0; m < n_markers; ++m) {
        for (int n = 1; n < truth.n_frames; ++n) {
            const TruthRecord& a = truth.at(n - 1, m);
            const TruthRecord& b = truth.at(n, m);
            const double d3 = std::hypot(b.world.x - a.world.x, b.world.y - a.world.y,
                                         b.world.z - a.world.z);
            for (int cam = 0; cam < truth.n_cameras; ++cam) {
                if (!a.visible[cam] || !b.visible[cam])
                    continue;
                const double d2 = std::hypot(b.image_points[cam].u - a.image_points[cam].u,
                                             b.image_points[cam].v - a.image_points[cam].v);
                if (d2 > 0.25)
                    ratios.push_back(d3 / d2);
            }
        }
    }
    double units_per_px = 1.0;
    if (!ratios.empty()) {
        std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2,
                         ratios.end());
        units_per_px = ratios[ratios.size() / 2];
    }

    EvalReport report;
    report.tol_px = tol_px;
    report.units_per_px = units_per_px;
    for (Condition c : condition_order())
        report.by_condition[c] = ConditionStats{};

    std::map<Condition, std::set<int>> frames_by_condition;
    std::set<int> total_frames;

    for (int n = 0; n < truth.n_frames; ++n) {
        for (int m = 0; m < n_markers; ++m) {
            const TruthRecord& t = truth.at(n, m);
            const TrajectoryRecord& r =
                *lookup[static_cast<std::size_t>(n) * n_markers + m];

            bool correct = false;
            if (t.condition == Condition::FullOcclusion ||
                t.condition == Condition::MissingStart) {
                // Hidden from every camera: only a coasting track that stays
                // near the true 3D path counts.
                if (r.status != TrackStatus::Tracked && r.world_point) {
                    const double err3 =
                        std::hypot(r.world_point->x - t.world.x,
                                   r.world_point->y - t.world.y,
                                   r.world_point->z - t.world.z);
                    correct = err3 < 5.0 * truth.marker_radius_px[m] * units_per_px;
                }
            } else {
                // The record's 2D point is the tracker's answer for the
                // frame, whether detected or coasted; it must sit on the
                // marker in every camera that sees it.
                correct = true;
                for (int cam = 0; cam < truth.n_cameras; ++cam) {
                    if (!t.visible[cam])
                        continue;
                    if (!r.image_points[cam]) {
                        correct = false;
                        break;
                    }
                    const double err =
                        std::hypot(r.image_points[cam]->u - t.image_points[cam].u,
                                   r.image_points[cam]->v - t.image_points[cam].v);
                    if (err > tol_px) {
                        correct = false;
                        break;
                    }
                }
            }

            ConditionStats& stats = report.by_condition[t.condition];
            stats.marker_frames += 1;
            stats.correct += correct ? 1 : 0;
            frames_by_condition[t.condition].insert(n);
            if (t.condition != Condition::MissingStart) {
                report.total.marker_frames += 1;
                report.total.correct += correct ? 1 : 0;
                total_frames.insert(n);
            }
        }
    }
    for (auto& [condition, frames] : frames_by_condition)
        report.by_condition[condition].frames = static_cast<long>(frames.size());
    report.total.frames = static_cast<long>(total_frames.size());

    // Occlusion events: maximal full-occlusion runs that end before the
    // sequence does; reacquired when a tracked record lands within tolerance
    // in every visible camera within 3 frames of reappearance.
    for (int m = 0; m < n_markers; ++m) {
        int n = 0;
        while (n < truth.n_frames) {
            if (truth.at(n, m).condition != Condition::FullOcclusion) {
                ++n;
                continue;
            }
            int end = n;
            while (end + 1 < truth.n_frames &&
                   truth.at(end + 1, m).condition == Condition::FullOcclusion)
                ++end;
            if (end + 1 < truth.n_frames) {
                report.occlusion_events += 1;
                bool reacquired = false;
                for (int k = end + 1; k <= std::min(end + 3, truth.n_frames - 1) && !reacquired;
                     ++k) {
                    const TruthRecord& t = truth.at(k, m);
                    const TrajectoryRecord& r =
                        *lookup[static_cast<std::size_t>(k) * n_markers + m];
                    if (r.status != TrackStatus::Tracked)
                        continue;
                    bool ok = true;
                    for (int cam = 0; cam < truth.n_cameras && ok; ++cam) {
                        if (!t.visible[cam])
                            continue;
                        ok = r.image_points[cam] &&
                             std::hypot(r.image_points[cam]->u - t.image_points[cam].u,
                                        r.image_points[cam]->v - t.image_points[cam].v) <=
                                 tol_px;
                    }
                    reacquired = ok;
                }
                report.reacquired_events += reacquired ? 1 : 0;
            }
            n = end + 1;
        }
    }
    return report;
}

std::string format_report(const EvalReport& report) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out << "tracking evaluation (tolerance " << std::setprecision(1)
        << report.tol_px << " px)\n";
    out << "condition             frames   markers   correct   percent\n";
    const auto row = [&](const std::string& name, const ConditionStats& s) {
        out << std::left << std::setw(20) << name << std::right << std::setw(8)
            << s.frames << std::setw(10) << s.marker_frames << std::setw(10)
            << s.correct << std::setw(10);
        if (s.marker_frames > 0)
            out << std::setprecision(2) << s.percentage();
        else
            out << "-";
        out << "\n";
    };
    for (Condition c : condition_order())
        row(to_string(c), report.by_condition.at(c));
    row("total*", report.total);
    out << "(*total excludes missing-start marker-frames)\n";
    if (report.occlusion_events > 0)
        out << "occlusion events: " << report.occlusion_events
            << ", reacquired within 3 frames: " << report.reacquired_events << "\n";

    out << "\nreference values from the original rat-data study (SLIC + 3D "
           "tracking),\nshown for context only; they are not reproducible on "
           "synthetic scenes\nand are never pass/fail targets:\n";
    out << std::setprecision(2);
    out << "  bad marker " << kRefBad << "%  missing start " << kRefMissing
        << "%  partially occluded " << kRefPartial << "%\n";
    out << "  occluded " << kRefOccluded << "%  perfect consecutive " << kRefPerfect
        << "%  total " << kRefTotal << "%\n";
    out << "  average time per 1,000-frame trial: " << kRefTiming
        << " (original hardware)\n";
    return out.str();
}

void write_report_csv(const std::string& path, const EvalReport& report) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << "condition,frames,marker_frames,correct_tracked,percentage,"
           "reference_slic3d_pct,reference_note\n";
    out.setf(std::ios::fixed);
    out.precision(2);
    const auto row = [&](const std::string& name, const ConditionStats& s,
                         double ref) {
        out << name << "," << s.frames << "," << s.marker_frames << "," << s.correct
            << ",";
        if (s.marker_frames > 0)
            out << s.percentage();
        out << "," << ref << ",reference only - original rat dataset\n";
    };
    for (Condition c : condition_order())
        row(to_string(c), report.by_condition.at(c), reference_pct(c));
    row("total_excl_missing_start", report.total, kRefTotal);
    out << "occlusion_events," << report.occlusion_events << ",,,,,\n";
    out << "occlusion_reacquired_within_3," << report.reacquired_events << ",,,,,\n";
}

} // namespace spx
