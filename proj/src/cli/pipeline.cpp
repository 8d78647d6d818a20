#include "uwr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>

namespace uwr::cli {

using nlohmann::json;
namespace fs = std::filesystem;
using imgcore::RasterImage;

namespace {

RasterImage read_image(const fs::path& path) {
    if (path.extension() == ".pfm") return imgcore::load_pfm(path);
    return imgcore::load_image(path);
}

RasterImage as_rgb(const RasterImage& img) {
    if (img.channels() == 3) return img;
    RasterImage out = RasterImage::rgb(img.width(), img.height());
    for (int c = 0; c < 3; ++c) out.set_channel(c, img);
    return out;
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

bool all_exist(std::initializer_list<fs::path> paths) {
    return std::all_of(paths.begin(), paths.end(), [](const fs::path& p) { return fs::exists(p); });
}

struct PairImages {
    RasterImage left;
    RasterImage right;
};

}  // namespace

json report_without_timings(json report) {
    report.erase("timings");
    return report;
}

json run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    for (const auto& p : {cfg.input_left, cfg.input_right})
        if (!fs::exists(p)) throw ConfigError("input not found: " + p.string());
    if (!cfg.truth_disparity.empty() && !fs::exists(cfg.truth_disparity))
        throw ConfigError("truth_disparity not found: " + cfg.truth_disparity.string());
    const fs::path out = cfg.output_dir;
    fs::create_directories(out);

    json report;
    report["config"] = config_to_json(cfg);
    report["stages"] = json::object();
    report["timings"] = json::object();

    auto run_stage = [&](const char* name, const std::function<void(json&)>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        json& r = report["stages"][name];
        r = json::object();
        try {
            body(r);
        } catch (const std::exception& e) {
            report["error"] = {{"stage", name}, {"cause", e.what()}};
            write_json(report, out / artifacts::kReport);
            throw StageError(name, e.what());
        }
        report["timings"][name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    // enhance
    PairImages enhanced;
    run_stage("enhance", [&](json& r) {
        const fs::path pl = out / artifacts::kEnhancedLeft, pr = out / artifacts::kEnhancedRight;
        if (cfg.stages.enhance) {
            const RasterImage l = as_rgb(read_image(cfg.input_left));
            const RasterImage rr = as_rgb(read_image(cfg.input_right));
            if (l.width() != rr.width() || l.height() != rr.height())
                throw std::runtime_error("left and right inputs differ in size");
            enhanced = {enhance::preprocess(l, cfg.enhance), enhance::preprocess(rr, cfg.enhance)};
            imgcore::save_pfm(enhanced.left, pl);
            imgcore::save_pfm(enhanced.right, pr);
            imgcore::save_image(enhanced.left, out / "enhanced_left.png");
            imgcore::save_image(enhanced.right, out / "enhanced_right.png");
            r["source"] = "computed";
        } else if (all_exist({pl, pr})) {
            enhanced = {imgcore::load_pfm(pl), imgcore::load_pfm(pr)};
            r["source"] = "persisted";
        } else {
            enhanced = {as_rgb(read_image(cfg.input_left)), as_rgb(read_image(cfg.input_right))};
            r["source"] = "input";
        }
        r["width"] = enhanced.left.width();
        r["height"] = enhanced.left.height();
    });

    const int w = enhanced.left.width(), h = enhanced.left.height();

    // tiepoints
    std::optional<tiepoints::TiePointSet> tps;
    run_stage("tiepoints", [&](json& r) {
        const fs::path path = out / artifacts::kTiePoints;
        if (cfg.stages.tiepoints) {
            const RasterImage gl = imgcore::to_gray(enhanced.left), gr = imgcore::to_gray(enhanced.right);
            const auto corners = tiepoints::detect_corners(gl, cfg.tiepoints.corners);
            const auto matched = tiepoints::match_corners(gl, gr, corners, cfg.tiepoints.match);
            tiepoints::ConsensusOptions co = cfg.tiepoints.consensus;
            co.seed = cfg.seed;
            tps = tiepoints::reject_outliers(matched, co);
            tiepoints::write_tiepoints(*tps, path);
            r["source"] = "computed";
            r["corners"] = corners.size();
            r["matches"] = matched.pairs.size();
        } else if (fs::exists(path)) {
            tps = tiepoints::read_tiepoints(path);
            r["source"] = "persisted";
        } else if (cfg.stages.rectify) {
            throw std::runtime_error("stage disabled and " + path.string() + " not found");
        } else {
            r["source"] = "skipped";
            return;
        }
        r["inliers"] = tps->inlier_count();
    });

    // rectify
    PairImages rectified;
    run_stage("rectify", [&](json& r) {
        const fs::path pm = out / artifacts::kRectification, pl = out / artifacts::kRectifiedLeft,
                       pr = out / artifacts::kRectifiedRight;
        if (cfg.stages.rectify) {
            rectify::EstimateOptions eo = cfg.rectify;
            eo.restart_seed = cfg.seed;
            const auto model = rectify::estimate_rectification(*tps, w, h, eo);
            const auto pair = rectify::warp_pair(enhanced.left, enhanced.right, model);
            rectified = {pair.left, pair.right};
            rectify::save_model(model, pm);
            imgcore::save_pfm(rectified.left, pl);
            imgcore::save_pfm(rectified.right, pr);
            imgcore::save_image(rectified.left, out / "rectified_left.png");
            imgcore::save_image(rectified.right, out / "rectified_right.png");
            r["source"] = "computed";
            r["residual_rms"] = model.residual_rms;
            r["iterations"] = model.iterations;
            r["restarts"] = model.restarts;
            r["alpha_fixed"] = model.alpha_fixed;
            r["vertical_disparity_before"] = rectify::vertical_disparity_rms(*tps);
            r["vertical_disparity_after"] = rectify::vertical_disparity_rms(rectify::rectify_tiepoints(*tps, model));
        } else if (all_exist({pl, pr})) {
            rectified = {imgcore::load_pfm(pl), imgcore::load_pfm(pr)};
            r["source"] = "persisted";
        } else if (cfg.stages.gcstereo) {
            throw std::runtime_error("stage disabled and rectified images not found in " + out.string());
        } else {
            r["source"] = "skipped";
        }
    });

    // gcstereo
    std::optional<gcstereo::DisparityMap> disp;
    run_stage("gcstereo", [&](json& r) {
        const fs::path pfm = out / artifacts::kDisparityPfm;
        if (cfg.stages.gcstereo) {
            gcstereo::StereoEnergyParams sp = cfg.gcstereo;
            sp.seed = cfg.seed;
            disp = gcstereo::solve_disparity(rectified.left, rectified.right, sp);
            gcstereo::save_disparity_pgm(*disp, sp.disparity_min, out / artifacts::kDisparityPgm);
            gcstereo::save_disparity_pfm(*disp, pfm);
            gcstereo::save_disparity_json(*disp, sp, out / artifacts::kDisparityJson);
            r["source"] = "computed";
            r["energy"] = disp->energy_value();
            r["sweeps"] = disp->sweeps;
            r["moves"] = disp->moves;
        } else if (fs::exists(pfm)) {
            disp = gcstereo::load_disparity_pfm(pfm);
            r["source"] = "persisted";
        } else if (cfg.stages.depth) {
            throw std::runtime_error("stage disabled and " + pfm.string() + " not found");
        } else {
            r["source"] = "skipped";
            return;
        }
        r["valid_fraction"] = disp->valid_fraction();
        if (!cfg.truth_disparity.empty()) {
            const auto truth = gcstereo::load_disparity_pfm(cfg.truth_disparity);
            if (truth.width != disp->width || truth.height != disp->height)
                throw std::runtime_error("truth disparity size differs from the disparity map");
            std::size_t scored = 0, correct = 0;
            for (std::size_t i = 0; i < truth.labels.size(); ++i) {
                if (!truth.valid[i] || !disp->valid[i]) continue;
                ++scored;
                correct += truth.labels[i] == disp->labels[i];
            }
            r["truth_scored_pixels"] = scored;
            r["correct_fraction"] = scored ? double(correct) / double(scored) : 0.0;
        }
    });

    // depth
    run_stage("depth", [&](json& r) {
        if (!cfg.stages.depth) {
            r["source"] = "skipped";
            return;
        }
        if (rectified.left.empty()) throw std::runtime_error("no rectified left image for the texture");
        depth::DepthMap dm = depth::triangulate_depth(*disp, *cfg.rig);
        dm = depth::smooth_depth(dm, cfg.depth.smooth_window);
        depth::save_depth_pfm(dm, out / artifacts::kDepth);
        const RasterImage texture = imgcore::clamp01(rectified.left);
        imgcore::save_image(texture, out / artifacts::kTexture);
        depth::SurfaceMesh mesh = depth::build_mesh(dm, texture, *cfg.rig, cfg.depth.stride, cfg.depth.max_edge);
        mesh.texture_file = artifacts::kTexture;
        depth::write_ply(mesh, out / artifacts::kMesh);
        r["source"] = "computed";
        r["valid_fraction"] = double(dm.valid_count()) / double(dm.depth.size());
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < dm.depth.size(); ++i)
            if (dm.valid[i]) {
                lo = std::min(lo, dm.depth[i]);
                hi = std::max(hi, dm.depth[i]);
            }
        r["depth_min"] = lo;
        r["depth_max"] = hi;
        r["vertices"] = mesh.vertices.size();
        r["triangles"] = mesh.triangles.size();
    });

    write_json(report, out / artifacts::kReport);
    return report;
}

}  // namespace uwr::cli
