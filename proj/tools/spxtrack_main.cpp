#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "spxtrack/config.hpp"
#include "spxtrack/csv.hpp"
#include "spxtrack/error.hpp"
#include "spxtrack/geometry.hpp"
#include "spxtrack/image_io.hpp"
#include "spxtrack/slic.hpp"
#include "spxtrack/synth.hpp"
#include "spxtrack/tracker.hpp"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 ok, 1 unexpected, 2 parse/usage, 3 degenerate geometry,
// 4 length/coverage mismatch, 5 missing input.
int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const spx::DegenerateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const spx::CoverageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const spx::MissingInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const spx::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

spx::Config load_config(const std::string& path,
                        const std::vector<std::string>& overrides) {
    spx::Config cfg = path.empty() ? spx::Config() : spx::Config::from_file(path);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw spx::ParseError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

void cmd_calibrate(const std::string& object_csv, const std::string& obs_csv,
                   const std::string& out_csv) {
    std::map<long, spx::Point3> balls;
    for (std::size_t i = 0; const auto& row : spx::csv_read_rows(object_csv)) {
        ++i;
        const std::string where = object_csv + " row " + std::to_string(i);
        if (row.size() != 4)
            throw spx::ParseError("expected ball_id,x,y,z at " + where);
        balls[spx::csv_to_long(row[0], where)] =
            spx::Point3{spx::csv_to_double(row[1], where),
                        spx::csv_to_double(row[2], where),
                        spx::csv_to_double(row[3], where)};
    }
    if (balls.empty())
        throw spx::ParseError("no calibration points in " + object_csv);

    std::map<int, spx::CalibrationSet> sets;
    for (std::size_t i = 0; const auto& row : spx::csv_read_rows(obs_csv)) {
        ++i;
        const std::string where = obs_csv + " row " + std::to_string(i);
        if (row.size() != 4)
            throw spx::ParseError("expected ball_id,cam_id,u,v at " + where);
        const long ball = spx::csv_to_long(row[0], where);
        const auto it = balls.find(ball);
        if (it == balls.end())
            throw spx::ParseError("unknown ball_id " + std::to_string(ball) + " at " +
                                  where);
        const int cam = static_cast<int>(spx::csv_to_long(row[1], where));
        sets[cam].pairs.push_back({it->second,
                                   spx::Point2{spx::csv_to_double(row[2], where),
                                               spx::csv_to_double(row[3], where)}});
    }
    if (sets.empty())
        throw spx::ParseError("no observations in " + obs_csv);

    std::vector<spx::CameraModel> cams;
    for (const auto& [cam_id, set] : sets) {
        spx::CalibrationReport report;
        cams.push_back(spx::calibrate(set, cam_id, &report));
        std::cout << "cam " << cam_id << ": rms " << report.rms << " px over "
                  << set.pairs.size() << " points\n";
    }
    spx::write_cameras_csv(out_csv, cams);
    std::cout << "wrote " << out_csv << "\n";
}

void cmd_synth(const std::string& scenario_path, const std::string& out_dir,
               long seed_override, bool png) {
    spx::Scenario scenario = spx::Scenario::from_json_file(scenario_path);
    if (seed_override >= 0)
        scenario.seed = static_cast<std::uint64_t>(seed_override);
    spx::generate_scene(scenario, out_dir, png);
    std::cout << "wrote " << scenario.n_frames << " frames x "
              << (scenario.cameras.empty() ? 2 : scenario.cameras.size())
              << " cameras to " << out_dir << "\n";
}

void cmd_track(const spx::Config& cfg, const std::vector<std::string>& cam_dirs,
               const std::string& cams_csv, const std::string& clicks_csv,
               const std::string& out_csv, const std::string& mode_override,
               const std::string& bayer) {
    spx::TrackerConfig tracker_cfg = spx::TrackerConfig::from_config(cfg);
    if (mode_override == "3d")
        tracker_cfg.mode = spx::TrackerConfig::Mode::ThreeD;
    else if (mode_override == "2d")
        tracker_cfg.mode = spx::TrackerConfig::Mode::TwoDBaseline;
    else if (!mode_override.empty())
        throw spx::ParseError("--mode must be 3d or 2d");

    std::optional<spx::BayerPattern> pattern;
    if (!bayer.empty())
        pattern = spx::bayer_pattern_from_string(bayer);

    std::vector<std::unique_ptr<spx::DirectoryFrameSource>> owned;
    std::vector<spx::FrameSource*> sources;
    for (std::size_t k = 0; k < cam_dirs.size(); ++k) {
        owned.push_back(std::make_unique<spx::DirectoryFrameSource>(
            cam_dirs[k], static_cast<int>(k), pattern));
        sources.push_back(owned.back().get());
    }

    const auto clicks = spx::read_clicks_csv(clicks_csv);
    if (clicks.empty())
        throw spx::MissingInputError("clicks file has no rows: " + clicks_csv);

    spx::TrackResult result;
    if (tracker_cfg.mode == spx::TrackerConfig::Mode::ThreeD) {
        if (cams_csv.empty())
            throw spx::MissingInputError("3d mode needs --cams CAMERAS_CSV");
        const auto cameras = spx::read_cameras_csv(cams_csv);
        if (cameras.size() < cam_dirs.size())
            throw spx::CoverageError("camera model file has fewer cameras than "
                                     "--cam-dir arguments");
        result = spx::run_tracker(
            sources,
            std::vector<spx::CameraModel>(cameras.begin(),
                                          cameras.begin() + cam_dirs.size()),
            clicks, tracker_cfg);
    } else {
        result = spx::run_2d_baseline(sources, clicks, tracker_cfg);
    }

    spx::write_trajectory_csv(out_csv, result.trajectory);
    std::cout << result.timing.table();
    std::cout << "wrote " << out_csv << "\n";
}

void cmd_eval(const std::string& trajectory_csv, const std::string& truth_csv,
              double tol_px, const std::string& out_csv) {
    const spx::Trajectory traj = spx::read_trajectory_csv(trajectory_csv);
    const spx::GroundTruth truth = spx::read_truth_csv(truth_csv);
    const spx::EvalReport report = spx::evaluate(traj, truth, tol_px);
    std::cout << spx::format_report(report);
    if (!out_csv.empty()) {
        spx::write_report_csv(out_csv, report);
        std::cout << "wrote " << out_csv << "\n";
    }
}

void cmd_slic(const std::string& image_path, int n_superpixels, double compactness,
              int iters, const std::string& labels_out,
              const std::string& overlay_out) {
    const spx::Frame frame = spx::read_image(image_path);
    spx::SlicParams params;
    params.n_superpixels = n_superpixels;
    params.compactness = compactness;
    params.max_iters = iters;
    const spx::Segmentation seg = spx::slic_segment(frame, params);
    std::cout << seg.n_labels << " superpixels\n";
    if (!labels_out.empty())
        spx::write_png_gray16(labels_out, spx::labels_to_gray16(seg), seg.width,
                              seg.height);
    if (!overlay_out.empty())
        spx::write_png(overlay_out, spx::overlay_boundaries(frame, seg));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-camera 3D marker tracking with SLIC superpixels"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    // calibrate
    auto* calibrate = app.add_subcommand(
        "calibrate", "solve DLT camera coefficients from point correspondences");
    std::string object_csv, obs_csv, calib_out;
    calibrate->add_option("--object", object_csv, "calibration object CSV: ball_id,x,y,z")
        ->required();
    calibrate->add_option("--observations", obs_csv, "observations CSV: ball_id,cam_id,u,v")
        ->required();
    calibrate->add_option("--out", calib_out, "output camera CSV")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "render a synthetic multi-camera scene");
    std::string scenario_path, synth_out;
    long seed_override = -1;
    bool synth_png = false;
    synth->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", seed_override, "override the scenario seed");
    synth->add_flag("--png", synth_png, "write PNG frames instead of PPM");

    // track
    auto* track = app.add_subcommand("track", "run the marker tracker over sequences");
    std::vector<std::string> cam_dirs;
    std::string cams_csv, clicks_csv, track_out, mode_override, bayer;
    track->add_option("--config", config_path, "config file (key = value lines)");
    track->add_option("--set", overrides, "override a config key, key=value")
        ->take_all();
    track->add_option("--cam-dir", cam_dirs, "per-camera frame directory (repeat)")
        ->required()
        ->expected(-1);
    track->add_option("--cams", cams_csv, "camera model CSV from calibrate/synth");
    track->add_option("--clicks", clicks_csv, "initialization clicks CSV")->required();
    track->add_option("--out", track_out, "output trajectory CSV")->required();
    track->add_option("--mode", mode_override, "3d (default) or 2d baseline");
    track->add_option("--bayer", bayer, "treat input frames as Bayer mosaics: rggb|bggr|grbg|gbrg");

    // eval
    auto* eval = app.add_subcommand("eval", "score a trajectory against ground truth");
    std::string traj_csv, truth_csv, report_out;
    double tol_px = -1;
    eval->add_option("--config", config_path, "config file (key = value lines)");
    eval->add_option("--set", overrides, "override a config key, key=value")->take_all();
    eval->add_option("--trajectory", traj_csv, "trajectory CSV from track")->required();
    eval->add_option("--truth", truth_csv, "ground truth CSV from synth")->required();
    eval->add_option("--tol-px", tol_px, "correctness tolerance in pixels");
    eval->add_option("--out", report_out, "also write the report as CSV");

    // slic (debug surface)
    auto* slic = app.add_subcommand("slic", "segment one image and dump debug output");
    std::string slic_image, labels_out, overlay_out;
    int slic_n = 1000;
    double slic_compactness = 10;
    int slic_iters = 10;
    slic->add_option("--image", slic_image, "input image (PPM/PGM/PNG)")->required();
    slic->add_option("--n", slic_n, "requested superpixel count");
    slic->add_option("--compactness", slic_compactness, "color normalizer");
    slic->add_option("--iters", slic_iters, "iteration count");
    slic->add_option("--labels-out", labels_out, "16-bit label map PNG");
    slic->add_option("--overlay-out", overlay_out, "boundary overlay PNG");

    CLI11_PARSE(app, argc, argv);

    return run_guarded([&] {
        if (calibrate->parsed()) {
            cmd_calibrate(object_csv, obs_csv, calib_out);
        } else if (synth->parsed()) {
            cmd_synth(scenario_path, synth_out, seed_override, synth_png);
        } else if (track->parsed()) {
            const spx::Config cfg = load_config(config_path, overrides);
            cmd_track(cfg, cam_dirs, cams_csv, clicks_csv, track_out, mode_override,
                      bayer);
        } else if (eval->parsed()) {
            const spx::Config cfg = load_config(config_path, overrides);
            cmd_eval(traj_csv, truth_csv,
                     tol_px > 0 ? tol_px : cfg.get_double("eval.tol_px"), report_out);
        } else if (slic->parsed()) {
            cmd_slic(slic_image, slic_n, slic_compactness, slic_iters, labels_out,
                     overlay_out);
        }
    });
}
