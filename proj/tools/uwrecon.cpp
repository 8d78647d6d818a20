#include "uwr/pipeline.hpp"
#include "uwr/synth.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace fs = std::filesystem;
using namespace uwr;
using nlohmann::json;

namespace {

// Collects leftover "--block.key value" / "--block.key=value" arguments.
json dotted_overrides(const std::vector<std::string>& rest) {
    json j = json::object();
    for (std::size_t i = 0; i < rest.size(); ++i) {
        const std::string& a = rest[i];
        if (a.rfind("--", 0) != 0 || a.find('.') == std::string::npos)
            throw cli::ConfigError("unexpected argument '" + a + "'");
        std::string key = a.substr(2), value;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else {
            if (i + 1 >= rest.size()) throw cli::ConfigError("missing value for '" + a + "'");
            value = rest[++i];
        }
        cli::apply_override(j, key, value);
    }
    return j;
}

imgcore::RasterImage read_image(const fs::path& p) {
    return p.extension() == ".pfm" ? imgcore::load_pfm(p) : imgcore::load_image(p);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Underwater stereo reconstruction"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run the full pipeline from a config file");
    run->allow_extras();
    std::string config_path, in_left, in_right, out_dir, truth;
    std::optional<std::uint64_t> seed;
    run->add_option("--config", config_path, "JSON configuration")->check(CLI::ExistingFile);
    run->add_option("--input-left", in_left);
    run->add_option("--input-right", in_right);
    run->add_option("--output-dir", out_dir);
    run->add_option("--truth-disparity", truth, "PFM ground truth scored in the report");
    run->add_option("--seed", seed);

    // enhance
    auto* enh = app.add_subcommand("enhance", "Preprocess one RGB image");
    enh->allow_extras();
    std::string enh_in, enh_out;
    enh->add_option("input", enh_in)->required()->check(CLI::ExistingFile);
    enh->add_option("output", enh_out)->required();

    // match
    auto* match = app.add_subcommand("match", "Detect and match tie points");
    match->allow_extras();
    std::string m_left, m_right, m_out;
    std::uint64_t m_seed = 0;
    match->add_option("left", m_left)->required()->check(CLI::ExistingFile);
    match->add_option("right", m_right)->required()->check(CLI::ExistingFile);
    match->add_option("output", m_out)->required();
    match->add_option("--seed", m_seed);

    // rectify
    auto* rect = app.add_subcommand("rectify", "Estimate the rectification and warp a pair");
    rect->allow_extras();
    std::string r_left, r_right, r_tp, r_out;
    std::uint64_t r_seed = 0;
    rect->add_option("left", r_left)->required()->check(CLI::ExistingFile);
    rect->add_option("right", r_right)->required()->check(CLI::ExistingFile);
    rect->add_option("--tiepoints", r_tp)->required()->check(CLI::ExistingFile);
    rect->add_option("--output-dir", r_out)->required();
    rect->add_option("--seed", r_seed);

    // mesh
    auto* mesh = app.add_subcommand("mesh", "Triangulate a disparity or depth map into a PLY mesh");
    mesh->allow_extras();
    std::string me_disp, me_depth, me_tex, me_out;
    auto* o_disp = mesh->add_option("--disparity", me_disp, "disparity PFM")->check(CLI::ExistingFile);
    mesh->add_option("--depth", me_depth, "depth PFM")->check(CLI::ExistingFile)->excludes(o_disp);
    mesh->add_option("--texture", me_tex)->required()->check(CLI::ExistingFile);
    mesh->add_option("--output", me_out)->required();

    // synth
    auto* syn = app.add_subcommand("synth", "Generate a synthetic stereo scene");
    std::string kind, s_out;
    cli::SceneParams sp;
    cli::DegradeParams dp;
    std::vector<double> cast;
    syn->add_option("kind", kind, "shifted_texture | two_plane | sphere_patch | rotated_camera_pair")->required();
    syn->add_option("--output-dir", s_out)->required();
    syn->add_option("--width", sp.width);
    syn->add_option("--height", sp.height);
    syn->add_option("--seed", sp.seed);
    syn->add_option("--contrast", sp.contrast);
    syn->add_option("--texture-cell", sp.texture_cell);
    syn->add_option("--shift", sp.shift);
    syn->add_option("--background-disparity", sp.background_disparity);
    syn->add_option("--foreground-disparity", sp.foreground_disparity);
    syn->add_option("--boundary", sp.boundary);
    syn->add_option("--focal-length", sp.focal_length);
    syn->add_option("--baseline", sp.baseline);
    syn->add_option("--sphere-radius", sp.sphere_radius);
    syn->add_option("--sphere-depth", sp.sphere_depth);
    syn->add_option("--background-depth", sp.background_depth);
    syn->add_option("--rotation-deg", sp.rotation_deg);
    syn->add_option("--tiepoint-count", sp.tiepoint_count);
    syn->add_option("--ramp-start", dp.ramp_start);
    syn->add_option("--ramp-end", dp.ramp_end);
    syn->add_option("--noise-sigma", dp.noise_sigma);
    syn->add_option("--cast", cast, "per-channel gains r g b")->expected(3);
    syn->add_option("--degrade-seed", dp.seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            json j = config_path.empty() ? json::object() : json::parse(std::ifstream(config_path));
            if (!in_left.empty()) j["input_left"] = in_left;
            if (!in_right.empty()) j["input_right"] = in_right;
            if (!out_dir.empty()) j["output_dir"] = out_dir;
            if (!truth.empty()) j["truth_disparity"] = truth;
            if (seed) j["seed"] = *seed;
            const json over = dotted_overrides(run->remaining());
            for (const auto& [block, value] : over.items()) {
                if (value.is_object())
                    for (const auto& [k, v] : value.items()) j[block][k] = v;
                else
                    j[block] = value;
            }
            const cli::PipelineConfig cfg = cli::config_from_json(j);
            const json report = cli::run_pipeline(cfg);
            std::cout << "report written to " << (cfg.output_dir / cli::artifacts::kReport).string() << '\n';
            if (report["stages"]["gcstereo"].contains("correct_fraction"))
                std::cout << "correct disparity fraction: " << report["stages"]["gcstereo"]["correct_fraction"] << '\n';
        } else if (*enh) {
            const auto cfg = cli::config_from_json(dotted_overrides(enh->remaining()));
            imgcore::RasterImage img = read_image(enh_in);
            if (img.channels() == 1) {
                imgcore::RasterImage rgb = imgcore::RasterImage::rgb(img.width(), img.height());
                for (int c = 0; c < 3; ++c) rgb.set_channel(c, img);
                img = rgb;
            }
            imgcore::save_image(enhance::preprocess(img, cfg.enhance), enh_out);
        } else if (*match) {
            const auto cfg = cli::config_from_json(dotted_overrides(match->remaining()));
            const auto gl = imgcore::to_gray(read_image(m_left)), gr = imgcore::to_gray(read_image(m_right));
            const auto corners = tiepoints::detect_corners(gl, cfg.tiepoints.corners);
            auto co = cfg.tiepoints.consensus;
            co.seed = m_seed;
            const auto tps = tiepoints::reject_outliers(tiepoints::match_corners(gl, gr, corners, cfg.tiepoints.match), co);
            tiepoints::write_tiepoints(tps, m_out);
            std::cout << tps.pairs.size() << " matches, " << tps.inlier_count() << " inliers\n";
        } else if (*rect) {
            const auto cfg = cli::config_from_json(dotted_overrides(rect->remaining()));
            const auto left = read_image(r_left), right = read_image(r_right);
            auto eo = cfg.rectify;
            eo.restart_seed = r_seed;
            const auto tps = tiepoints::read_tiepoints(r_tp);
            const auto model = rectify::estimate_rectification(tps, left.width(), left.height(), eo);
            const auto pair = rectify::warp_pair(left, right, model);
            fs::create_directories(r_out);
            rectify::save_model(model, fs::path(r_out) / cli::artifacts::kRectification);
            imgcore::save_pfm(pair.left, fs::path(r_out) / cli::artifacts::kRectifiedLeft);
            imgcore::save_pfm(pair.right, fs::path(r_out) / cli::artifacts::kRectifiedRight);
            imgcore::save_image(pair.left, fs::path(r_out) / "rectified_left.png");
            imgcore::save_image(pair.right, fs::path(r_out) / "rectified_right.png");
            std::cout << "vertical disparity rms " << rectify::vertical_disparity_rms(tps) << " -> "
                      << rectify::vertical_disparity_rms(rectify::rectify_tiepoints(tps, model)) << " px\n";
        } else if (*mesh) {
            const json j = dotted_overrides(mesh->remaining());
            const auto cfg = cli::config_from_json(j);
            if (!cfg.rig) throw cli::ConfigError("mesh needs --rig.focal_length and --rig.baseline");
            depth::DepthMap dm;
            if (!me_disp.empty())
                dm = depth::triangulate_depth(gcstereo::load_disparity_pfm(me_disp), *cfg.rig);
            else if (!me_depth.empty())
                dm = depth::load_depth_pfm(me_depth);
            else
                throw cli::ConfigError("mesh needs --disparity or --depth");
            dm = depth::smooth_depth(dm, cfg.depth.smooth_window);
            const auto texture = imgcore::clamp01(read_image(me_tex));
            auto m = depth::build_mesh(dm, texture, *cfg.rig, cfg.depth.stride, cfg.depth.max_edge);
            m.texture_file = fs::path(me_tex).filename().string();
            depth::write_ply(m, me_out);
            std::cout << m.vertices.size() << " vertices, " << m.triangles.size() << " triangles\n";
        } else if (*syn) {
            if (!cast.empty()) dp.color_cast = {cast[0], cast[1], cast[2]};
            cli::Scene scene = cli::generate_scene(cli::scene_kind_from_string(kind), sp);
            scene.left = cli::degrade_scene(scene.left, dp);
            cli::DegradeParams dr = dp;
            dr.seed = dp.seed + 1;
            scene.right = cli::degrade_scene(scene.right, dr);
            cli::save_scene(scene, s_out);
            std::cout << "scene written to " << s_out << '\n';
        }
    } catch (const cli::StageError& e) {
        std::cerr << "error [" << e.stage() << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
