// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "support.hpp"

#include "uwr/depth.hpp"
#include "uwr/enhance.hpp"
#include "uwr/gcstereo.hpp"
#include "uwr/pipeline.hpp"
#include "uwr/rectify.hpp"
#include "uwr/synth.hpp"

#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

using namespace uwr;
namespace fs = std::filesystem;
using gcstereo::Capacity;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---- 1 ---------------------------------------------------------------------

Capacity brute_force_min_cut(const gcstereo::FlowGraph& g) {
    const int n = g.node_count();
    std::vector<int> free_nodes;
    for (int v = 0; v < n; ++v)
        if (v != g.source() && v != g.sink()) free_nodes.push_back(v);
    Capacity best = std::numeric_limits<Capacity>::max();
    for (std::uint32_t mask = 0; mask < (1u << free_nodes.size()); ++mask) {
        std::vector<bool> side(std::size_t(n), false);
        side[std::size_t(g.source())] = true;
        for (std::size_t k = 0; k < free_nodes.size(); ++k)
            if (mask & (1u << k)) side[std::size_t(free_nodes[k])] = true;
        best = std::min(best, gcstereo::cut_capacity(g, side));
    }
    return best;
}

Outcome max_flow_exactness() {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> nodes(2, 10), cap(0, 9);
    int agree = 0;
    for (int t = 0; t < 50; ++t) {
        const int n = nodes(rng);
        gcstereo::FlowGraph g(n, 0, n - 1);
        std::uniform_int_distribution<int> pick(0, n - 1), arcs(0, 3 * n);
        const int m = arcs(rng);
        for (int k = 0; k < m; ++k) {
            const int a = pick(rng), b = pick(rng);
            if (a != b) g.add_arc(a, b, cap(rng), k % 3 == 0 ? cap(rng) : 0);
        }
        agree += gcstereo::max_flow(g).flow == brute_force_min_cut(g);
    }
    return {agree == 50, fmt("%d/50 graphs match the exhaustive minimum cut", agree)};
}

// ---- 2 ---------------------------------------------------------------------

Outcome expansion_optimality() {
    std::mt19937_64 rng(2);
    int agree = 0, checks = 0;
    for (int t = 0; t < 20; ++t) {
        const int w = 2, h = t % 2 ? 2 : 1, labels = 2 + t % 2;
        gcstereo::CostVolume cv;
        cv.width = w;
        cv.height = h;
        cv.disparity_min = 0;
        cv.disparity_max = labels - 1;
        cv.cost.resize(std::size_t(w * h * labels));
        cv.out_of_bounds.assign(cv.cost.size(), 0);
        std::uniform_int_distribution<int> c(0, 20), lab(0, labels - 1);
        for (auto& v : cv.cost) v = c(rng);
        gcstereo::StereoEnergyParams p;
        p.disparity_min = 0;
        p.disparity_max = labels - 1;
        p.smoothness_weight = std::uniform_real_distribution<double>(0.0, 0.012)(rng);
        p.smoothness = t % 3 == 0 ? gcstereo::Smoothness::Potts : gcstereo::Smoothness::TruncatedLinear;
        p.smoothness_truncation = 1 + t % 2;
        gcstereo::DisparityMap m;
        m.width = w;
        m.height = h;
        for (int i = 0; i < w * h; ++i) m.labels.push_back(lab(rng));
        m.valid.assign(std::size_t(w * h), 1);
        m.energy = gcstereo::energy_of(m, cv, p);
        // One sweep over all labels, each move checked against enumeration.
        for (int alpha = 0; alpha < labels; ++alpha) {
            Capacity best = std::numeric_limits<Capacity>::max();
            for (int mask = 0; mask < (1 << (w * h)); ++mask) {
                auto f = m.labels;
                for (int i = 0; i < w * h; ++i)
                    if (mask & (1 << i)) f[std::size_t(i)] = alpha;
                best = std::min(best, gcstereo::energy_of(f, cv, p));
            }
            const auto out = gcstereo::expansion_move(m, alpha, cv, p);
            ++checks;
            agree += out.energy == best && gcstereo::energy_of(out, cv, p) == best;
            m = out;
        }
    }
    return {agree == checks, fmt("%d/%d expansion moves equal the enumerated optimum", agree, checks)};
}

// ---- 3 ---------------------------------------------------------------------

Outcome stereo_recovery(double& shifted_seconds, double& plane_seconds) {
    gcstereo::StereoEnergyParams p;
    p.disparity_min = 0;
    p.disparity_max = 10;

    auto t0 = std::chrono::steady_clock::now();
    cli::SceneParams sp;
    sp.shift = 5;
    const auto shifted = cli::generate_scene(cli::SceneKind::ShiftedTexture, sp);
    const auto m = gcstereo::solve_disparity(shifted.left, shifted.right, p);
    int valid = 0, good = 0;
    for (std::size_t i = 0; i < m.labels.size(); ++i)
        if (m.valid[i]) {
            ++valid;
            good += m.labels[i] == 5;
        }
    const double shifted_exact = valid ? double(good) / valid : 0.0;
    shifted_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    t0 = std::chrono::steady_clock::now();
    cli::SceneParams tp;
    tp.background_disparity = 3;
    tp.foreground_disparity = 8;
    const auto planes = cli::generate_scene(cli::SceneKind::TwoPlane, tp);
    const int b = tp.width / 2;
    const auto q = gcstereo::solve_disparity(planes.left, planes.right, p);
    valid = good = 0;
    int rows_ok = 0;
    for (int y = 0; y < q.height; ++y) {
        for (int x = 0; x < q.width; ++x)
            if (q.is_valid(x, y)) {
                ++valid;
                good += q.at(x, y) == (x >= b ? 8 : 3);
            }
        // First valid column from which the foreground label persists; the
        // occluded strip left of the foreground is invalid and skipped.
        int edge = q.width;
        for (int x = q.width - 1; x >= 0 && (!q.is_valid(x, y) || q.at(x, y) >= 6); --x)
            if (q.is_valid(x, y)) edge = x;
        rows_ok += std::abs(edge - b) <= 2;
    }
    const double plane_exact = valid ? double(good) / valid : 0.0;
    plane_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const bool pass = shifted_exact >= 0.95 && plane_exact >= 0.90 && rows_ok == q.height &&
                      shifted_seconds < 30.0 && plane_seconds < 30.0;
    return {pass, fmt("shifted %.4f exact (%.1f s); two_plane %.4f exact, boundary within 2 px on %d/%d rows (%.1f s)",
                      shifted_exact, shifted_seconds, plane_exact, rows_ok, q.height, plane_seconds)};
}

// ---- 4 ---------------------------------------------------------------------

Outcome rectification() {
    cli::SceneParams sp;
    sp.width = 800;
    sp.height = 600;
    sp.focal_length = 500.0;
    sp.rotation_deg = 5.0;
    sp.tiepoint_count = 60;
    const auto scene = cli::generate_scene(cli::SceneKind::RotatedCameraPair, sp);
    const auto& exact = scene.tiepoints;
    const double before = rectify::vertical_disparity_rms(exact);
    const auto model = rectify::estimate_rectification(exact, sp.width, sp.height);
    const double after = rectify::vertical_disparity_rms(rectify::rectify_tiepoints(exact, model));

    const double sigma = 0.5;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto noisy = exact;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n(0.0, sigma);
        for (auto& tp : noisy.pairs) {
            tp.left += Eigen::Vector2d(n(rng), n(rng));
            tp.right += Eigen::Vector2d(n(rng), n(rng));
        }
        const auto nm = rectify::estimate_rectification(noisy, sp.width, sp.height);
        worst = std::max(worst, rectify::vertical_disparity_rms(rectify::rectify_tiepoints(noisy, nm)));
    }
    const bool pass = after < 0.3 && before > 5.0 && worst <= 1.5 * sigma;
    return {pass, fmt("vertical disparity %.3f -> %.2e px; with 0.5 px noise worst of 5 seeds %.3f px (%.2f sigma)",
                      before, after, worst, worst / sigma)};
}

// ---- 5 ---------------------------------------------------------------------

Outcome sampson_hand_value() {
    const double e = rectify::sampson_error(Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(0, 1, 1), rectify::skew_u1());
    return {std::abs(e - 0.5) <= 1e-12, fmt("E^2 = %.17g for m_l = (0,0), m_r = (0,1)", e)};
}

// ---- 6 ---------------------------------------------------------------------

Outcome wavelet_engine() {
    const auto bank = enhance::FilterBank::farras();
    double worst_pr = 0.0, worst_parseval = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto img = testing::random_gray(64, 64, seed);
        const auto pyr = enhance::dwt2(img, 3, bank);
        double e_img = 0.0, e_coef = 0.0;
        for (double v : img.samples()) e_img += v * v;
        for (const auto& d : pyr.details)
            for (const auto* band : {&d.lh, &d.hl, &d.hh})
                for (double v : band->samples()) e_coef += v * v;
        for (double v : pyr.lowpass.samples()) e_coef += v * v;
        worst_parseval = std::max(worst_parseval, std::abs(e_coef - e_img) / e_img);
        worst_pr = std::max(worst_pr, testing::max_abs_diff(enhance::idwt2(pyr, bank), img));
    }
    const auto noise = testing::gaussian_noise(256, 256, 0.1, 99);
    const double sigma = enhance::estimate_noise_sigma(enhance::dwt2(noise, 1, bank));
    const bool pass = worst_pr <= 1e-8 && worst_parseval <= 1e-6 && sigma >= 0.08 && sigma <= 0.12;
    return {pass, fmt("reconstruction %.2e max-abs, Parseval %.2e relative, sigma estimate %.4f for 0.1",
                      worst_pr, worst_parseval, sigma)};
}

// ---- 7 ---------------------------------------------------------------------

Outcome homomorphic_correction() {
    const int n = 128;
    const auto tex = testing::smooth_texture(n, n, 2.0, 0.35, 21);
    auto f = imgcore::RasterImage::gray(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) f.at(x, y) = tex.at(x, y) * (0.3 + 0.7 * x / double(n - 1));
    enhance::HomomorphicParams p;  // r_H = 2.5, r_L = 0.5
    p.cutoff_sigma = 16.0;
    const auto g = enhance::homomorphic_filter(f, p);
    const double before = testing::low_frequency_ratio(f, p.cutoff_sigma);
    const double after = testing::low_frequency_ratio(g, p.cutoff_sigma);
    return {after * 2.0 <= before,
            fmt("low-frequency energy ratio %.4f -> %.4f (%.2fx)", before, after, before / after)};
}

// ---- 8 ---------------------------------------------------------------------

Outcome diffusion() {
    enhance::DiffusionParams p;  // K = 0.1, lambda = 0.2, 5 iterations
    const auto flat = imgcore::RasterImage::gray(32, 32, 0.42);
    const bool fixed = enhance::anisotropic_diffuse(flat, p) == flat;

    const int n = 64;
    auto noisy = imgcore::RasterImage::gray(n, n);
    const auto noise = testing::gaussian_noise(n, n, 0.02, 33);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) noisy.at(x, y) = (x < n / 2 ? 0.1 : 0.9) + noise.at(x, y);
    const auto out = enhance::anisotropic_diffuse(noisy, p);
    auto flat_variance = [&](const imgcore::RasterImage& im) {
        std::vector<double> v;
        for (int y = 0; y < n; ++y)
            for (int x = 4; x < n / 2 - 4; ++x) v.push_back(im.at(x, y));
        return testing::variance_of(v);
    };
    double left = 0.0, right = 0.0;
    for (int y = 0; y < n; ++y) {
        left += out.at(n / 2 - 1, y);
        right += out.at(n / 2, y);
    }
    const double edge = (right - left) / n / 0.8;
    const double reduction = flat_variance(noisy) / flat_variance(out);
    return {fixed && edge >= 0.9 && reduction >= 4.0,
            fmt("constant image %s; edge height kept %.3f, flat variance reduced %.1fx",
                fixed ? "unchanged" : "CHANGED", edge, reduction)};
}

// ---- 9 ---------------------------------------------------------------------

Outcome triangulation() {
    int cases = 0, within = 0;
    for (const double f : {200.0, 713.25, 1000.0, 2400.5})
        for (const double B : {0.05, 0.1, 0.1234, 0.5})
            for (int d = 1; d <= 256; ++d) {
                const depth::CameraRig rig{f, B};
                const double back = depth::disparity_from_depth(depth::depth_from_disparity(d, rig), rig);
                ++cases;
                within += std::abs(back - d) <= std::nextafter(double(d), 1e9) - d;
            }
    const double z = depth::depth_from_disparity(50.0, depth::CameraRig{1000.0, 0.1});
    return {within == cases && std::abs(z - 2.0) <= 1e-15,
            fmt("%d/%d round trips within 1 ulp; f=1000, B=0.1, d=50 -> z=%.15g m", within, cases, z)};
}

// ---- 10 --------------------------------------------------------------------

Outcome mesh_geometry() {
    cli::SceneParams sp;  // sphere patch covering the 128x128 view
    const auto scene = cli::generate_scene(cli::SceneKind::SpherePatch, sp);
    const auto mesh = depth::build_mesh(scene.truth_depth, scene.left, scene.rig, 2, 3.0);
    const Eigen::Vector3d centre(0, 0, sp.sphere_depth);
    double se = 0.0;
    std::size_t samples = 0;
    for (const auto& v : mesh.vertices) {
        se += std::pow((v - centre).norm() - sp.sphere_radius, 2);
        ++samples;
    }
    for (const auto& t : mesh.triangles) {
        const Eigen::Vector3d c = (mesh.vertices[std::size_t(t[0])] + mesh.vertices[std::size_t(t[1])] +
                                   mesh.vertices[std::size_t(t[2])]) / 3.0;
        se += std::pow((c - centre).norm() - sp.sphere_radius, 2);
        ++samples;
    }
    const double rms = std::sqrt(se / double(samples));

    int violations = 0;
    const auto& pts = mesh.pixels;
    for (const auto& t : mesh.triangles) {
        const Eigen::Vector2d a = pts[std::size_t(t[0])], b = pts[std::size_t(t[1])], c = pts[std::size_t(t[2])];
        const double d = 2.0 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) + c.x() * (a.y() - b.y()));
        const Eigen::Vector2d u((a.squaredNorm() * (b.y() - c.y()) + b.squaredNorm() * (c.y() - a.y()) +
                                 c.squaredNorm() * (a.y() - b.y())) / d,
                                (a.squaredNorm() * (c.x() - b.x()) + b.squaredNorm() * (a.x() - c.x()) +
                                 c.squaredNorm() * (b.x() - a.x())) / d);
        const double r = (a - u).norm();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (int(i) == t[0] || int(i) == t[1] || int(i) == t[2]) continue;
            if ((pts[i] - u).norm() < r - 1e-9 * std::max(1.0, r)) ++violations;
        }
    }
    return {rms < 0.01 * sp.sphere_radius && violations == 0 && !mesh.triangles.empty(),
            fmt("%zu triangles, surface RMS %.2e m (%.4f%% of radius), %d circumcircle violations",
                mesh.triangles.size(), rms, 100.0 * rms / sp.sphere_radius, violations)};
}

// ---- 11 --------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome end_to_end_determinism() {
    const fs::path root = fs::temp_directory_path() / "uwr_acceptance_determinism";
    fs::remove_all(root);
    cli::SceneParams sp;
    sp.background_disparity = 3;
    sp.foreground_disparity = 8;
    cli::Scene scene = cli::generate_scene(cli::SceneKind::TwoPlane, sp);
    cli::DegradeParams dp;
    dp.ramp_start = 0.5;
    dp.ramp_end = 1.0;
    dp.noise_sigma = 0.02;
    dp.color_cast = {0.7, 0.9, 1.0};
    dp.seed = 11;
    scene.left = cli::degrade_scene(scene.left, dp);
    dp.seed = 12;
    scene.right = cli::degrade_scene(scene.right, dp);
    cli::save_scene(scene, root / "scene");

    std::vector<std::string> outputs[2];
    for (int run = 0; run < 2; ++run) {
        const fs::path out = root / ("run" + std::to_string(run));
        const std::string cmd = std::string("\"") + UWRECON_PATH + "\" run --input-left " +
                                (root / "scene" / "left.pfm").string() + " --input-right " +
                                (root / "scene" / "right.pfm").string() + " --output-dir " + out.string() +
                                " --seed 5 --rig.focal_length 200 --rig.baseline 0.1 --gcstereo.disparity_max 12"
                                " > " + (root / ("run" + std::to_string(run) + ".log")).string() + " 2>&1";
        if (std::system(cmd.c_str()) != 0) return {false, "uwrecon run failed, see " + (root / "run0.log").string()};
        for (const char* f : {cli::artifacts::kDisparityPgm, cli::artifacts::kDisparityPfm, cli::artifacts::kDepth,
                              cli::artifacts::kMesh})
            outputs[run].push_back(slurp(out / f));
    }
    int identical = 0;
    for (std::size_t i = 0; i < outputs[0].size(); ++i) identical += !outputs[0][i].empty() && outputs[0][i] == outputs[1][i];
    return {identical == 4, fmt("%d/4 artifacts byte-identical (disparity PGM, disparity PFM, depth PFM, mesh PLY)", identical)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_s;  // 0: no time limit
        std::function<Outcome()> run;
    };
    double shifted_s = 0.0, plane_s = 0.0;
    const std::vector<Criterion> criteria{
        {"max-flow exactness", 1.0, max_flow_exactness},
        {"expansion-move optimality at toy scale", 1.0, expansion_optimality},
        {"synthetic stereo recovery", 0.0, [&] { return stereo_recovery(shifted_s, plane_s); }},
        {"rectification", 5.0, rectification},
        {"Sampson hand value", 0.0, sampson_hand_value},
        {"wavelet engine", 2.0, wavelet_engine},
        {"homomorphic correction", 2.0, homomorphic_correction},
        {"diffusion", 2.0, diffusion},
        {"triangulation", 0.0, triangulation},
        {"mesh geometry", 10.0, mesh_geometry},
        {"end-to-end determinism", 0.0, end_to_end_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0.0 && secs >= c.limit_s) {
            o.pass = false;
            o.detail += fmt("; over the %.0f s limit", c.limit_s);
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed ? 1 : 0;
}
