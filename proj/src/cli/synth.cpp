#include "uwr/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>

namespace uwr::cli {

SceneKind scene_kind_from_string(const std::string& s) {
    if (s == "shifted_texture") return SceneKind::ShiftedTexture;
    if (s == "two_plane") return SceneKind::TwoPlane;
    if (s == "sphere_patch") return SceneKind::SpherePatch;
    if (s == "rotated_camera_pair") return SceneKind::RotatedCameraPair;
    throw SceneError("unknown scene kind '" + s + "'");
}

const char* to_string(SceneKind k) {
    switch (k) {
    case SceneKind::ShiftedTexture: return "shifted_texture";
    case SceneKind::TwoPlane: return "two_plane";
    case SceneKind::SpherePatch: return "sphere_patch";
    case SceneKind::RotatedCameraPair: return "rotated_camera_pair";
    }
    return "?";
}

void SceneParams::validate(SceneKind kind) const {
    if (width < 8 || height < 8) throw SceneError("scene: width and height must be at least 8");
    if (!(contrast > 0.0) || contrast > 0.5) throw SceneError("scene: contrast must lie in (0, 0.5]");
    if (!(texture_cell > 0.0)) throw SceneError("scene: texture_cell must be > 0");
    switch (kind) {
    case SceneKind::ShiftedTexture:
        if (shift < 0 || shift >= width) throw SceneError("scene: shift must lie in [0, width)");
        break;
    case SceneKind::TwoPlane: {
        const int b = boundary < 0 ? width / 2 : boundary;
        if (background_disparity < 0 || foreground_disparity <= background_disparity)
            throw SceneError("scene: need 0 <= background_disparity < foreground_disparity");
        if (foreground_disparity >= width) throw SceneError("scene: foreground_disparity exceeds the width");
        if (b <= 0 || b >= width) throw SceneError("scene: boundary must lie inside the image");
        break;
    }
    case SceneKind::SpherePatch:
    case SceneKind::RotatedCameraPair:
        if (!(focal_length > 0.0) || !(baseline > 0.0)) throw SceneError("scene: focal_length and baseline must be > 0");
        if (!(sphere_radius > 0.0) || !(sphere_depth > sphere_radius))
            throw SceneError("scene: the sphere must lie in front of the camera");
        if (!(background_depth > sphere_depth)) throw SceneError("scene: background must lie behind the sphere centre");
        if (!std::isfinite(rotation_deg) || std::abs(rotation_deg) >= 45.0)
            throw SceneError("scene: rotation_deg must lie in (-45, 45)");
        if (kind == SceneKind::RotatedCameraPair && tiepoint_count < tiepoints::kMinPairs)
            throw SceneError("scene: tiepoint_count must be at least 8");
        break;
    }
}

namespace {

std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double lattice(std::uint64_t seed, std::int64_t i, std::int64_t j, std::int64_t k) {
    std::uint64_t h = mix(seed);
    h = mix(h ^ std::uint64_t(i));
    h = mix(h ^ std::uint64_t(j));
    h = mix(h ^ std::uint64_t(k));
    return double(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

// Trilinear value noise in [-1, 1] on a unit lattice.
double value_noise(double x, double y, double z, std::uint64_t seed) {
    const double fx = std::floor(x), fy = std::floor(y), fz = std::floor(z);
    const auto ix = std::int64_t(fx), iy = std::int64_t(fy), iz = std::int64_t(fz);
    const double tx = x - fx, ty = y - fy, tz = z - fz;
    double v = 0.0;
    for (int c = 0; c < 8; ++c) {
        const int a = c & 1, b = (c >> 1) & 1, d = (c >> 2) & 1;
        const double w = (a ? tx : 1 - tx) * (b ? ty : 1 - ty) * (d ? tz : 1 - tz);
        if (w != 0.0) v += w * lattice(seed, ix + a, iy + b, iz + d);
    }
    return v;
}

// Colour texture at lattice coordinates: a shared luminance pattern plus a
// weaker per-channel component.
std::array<double, 3> texture_rgb(const Eigen::Vector3d& q, double contrast, std::uint64_t seed) {
    const double base = value_noise(q.x(), q.y(), q.z(), seed);
    std::array<double, 3> out{};
    for (int c = 0; c < 3; ++c)
        out[std::size_t(c)] = 0.5 + contrast * (0.75 * base + 0.25 * value_noise(q.x(), q.y(), q.z(), seed + 101 + std::uint64_t(c)));
    return out;
}

void put(RasterImage& img, int x, int y, const std::array<double, 3>& c) {
    for (int k = 0; k < 3; ++k) img.at(x, y, k) = c[std::size_t(k)];
}

gcstereo::DisparityMap empty_truth(int w, int h) {
    gcstereo::DisparityMap t;
    t.width = w;
    t.height = h;
    t.labels.assign(std::size_t(w) * h, 0);
    t.valid.assign(std::size_t(w) * h, 0);
    return t;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return m;
}

Eigen::Matrix3d rectified_F(const Eigen::Matrix3d& K, double baseline) {
    // Right camera: Y = X - B e_x, so E = [t]x with t = -B e_x.
    const Eigen::Matrix3d Kinv = K.inverse();
    return Kinv.transpose() * skew(Eigen::Vector3d(-baseline, 0, 0)) * Kinv;
}

Scene shifted_texture(const SceneParams& p) {
    Scene s;
    s.left = RasterImage::rgb(p.width, p.height);
    s.right = RasterImage::rgb(p.width, p.height);
    s.truth = empty_truth(p.width, p.height);
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x) {
            put(s.left, x, y, texture_rgb({x / p.texture_cell, y / p.texture_cell, 0.0}, p.contrast, p.seed));
            put(s.right, x, y, texture_rgb({(x + p.shift) / p.texture_cell, y / p.texture_cell, 0.0}, p.contrast, p.seed));
            const std::size_t i = std::size_t(y) * p.width + x;
            s.truth.labels[i] = p.shift;
            s.truth.valid[i] = x - p.shift >= 0;
        }
    s.surface = {{"type", "fronto_parallel_plane"}, {"disparity", p.shift}};
    return s;
}

Scene two_plane(const SceneParams& p) {
    Scene s;
    const int b = p.boundary < 0 ? p.width / 2 : p.boundary;
    const int dfg = p.foreground_disparity, dbg = p.background_disparity;
    const std::uint64_t fg_seed = p.seed, bg_seed = mix(p.seed ^ 0x5bd1e995ULL);
    auto fg = [&](int x, int y) { return texture_rgb({x / p.texture_cell, y / p.texture_cell, 0.0}, p.contrast, fg_seed); };
    auto bg = [&](int x, int y) { return texture_rgb({x / p.texture_cell, y / p.texture_cell, 0.0}, p.contrast, bg_seed); };
    s.left = RasterImage::rgb(p.width, p.height);
    s.right = RasterImage::rgb(p.width, p.height);
    s.truth = empty_truth(p.width, p.height);
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x) {
            put(s.left, x, y, x >= b ? fg(x, y) : bg(x, y));
            put(s.right, x, y, x + dfg >= b ? fg(x + dfg, y) : bg(x + dbg, y));
            const std::size_t i = std::size_t(y) * p.width + x;
            const int d = x >= b ? dfg : dbg;
            s.truth.labels[i] = d;
            // Background just left of the boundary is hidden behind the
            // foreground in the right view.
            const bool occluded = x < b && x - dbg + dfg >= b;
            s.truth.valid[i] = x - d >= 0 && !occluded;
        }
    s.surface = {{"type", "two_fronto_parallel_planes"},
                 {"boundary", b},
                 {"background_disparity", dbg},
                 {"foreground_disparity", dfg}};
    return s;
}

struct RayScene {
    Eigen::Vector3d centre;
    double radius;
    double background;

    // Ray parameter t of the nearest surface along o + t dir.
    double hit(const Eigen::Vector3d& o, const Eigen::Vector3d& dir) const {
        const Eigen::Vector3d oc = o - centre;
        const double a = dir.squaredNorm(), b = oc.dot(dir), c = oc.squaredNorm() - radius * radius;
        const double disc = b * b - a * c;
        if (disc > 0) {
            const double t = (-b - std::sqrt(disc)) / a;
            if (t > 0) return t;
        }
        if (dir.z() <= 0) return std::numeric_limits<double>::infinity();
        return (background - o.z()) / dir.z();
    }
};

struct Camera {
    Eigen::Matrix3d K;
    Eigen::Matrix3d R;  // world to camera
    Eigen::Vector3d C;  // centre in world (left camera) coordinates

    Eigen::Vector3d ray(double x, double y) const { return R.transpose() * K.inverse() * Eigen::Vector3d(x, y, 1.0); }
    std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& X) const {
        const Eigen::Vector3d c = K * (R * (X - C));
        if (c.z() <= 0) return std::nullopt;
        return Eigen::Vector2d(c.x() / c.z(), c.y() / c.z());
    }
};

RasterImage render(const Camera& cam, const RayScene& sc, int w, int h, double cell, double contrast,
                   std::uint64_t seed) {
    RasterImage img = RasterImage::rgb(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::array<double, 3> acc{};
            for (int k = 0; k < 4; ++k) {
                const Eigen::Vector3d dir = cam.ray(x - 0.25 + 0.5 * (k & 1), y - 0.25 + 0.5 * (k >> 1));
                const double t = sc.hit(cam.C, dir);
                const Eigen::Vector3d P = cam.C + t * dir;
                const auto c = texture_rgb(P / cell, contrast, seed);
                for (int j = 0; j < 3; ++j) acc[std::size_t(j)] += 0.25 * c[std::size_t(j)];
            }
            put(img, x, y, acc);
        }
    return img;
}

Scene ray_cast(const SceneParams& p, double yaw_deg, bool with_tiepoints) {
    Scene s;
    const int w = p.width, h = p.height;
    s.rig = {p.focal_length, p.baseline};
    Eigen::Matrix3d K;
    K << p.focal_length, 0, w / 2.0, 0, p.focal_length, h / 2.0, 0, 0, 1;
    const RayScene sc{{0.0, 0.0, p.sphere_depth}, p.sphere_radius, p.background_depth};
    const Camera left{K, Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero()};
    const double yaw = yaw_deg * std::numbers::pi / 180.0;
    const Eigen::Matrix3d R = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()).toRotationMatrix();
    const Camera right{K, R, Eigen::Vector3d(p.baseline, 0, 0)};
    const double cell = p.texture_cell * (p.sphere_depth - p.sphere_radius) / p.focal_length;

    s.left = render(left, sc, w, h, cell, p.contrast, p.seed);
    s.right = render(right, sc, w, h, cell, p.contrast, p.seed);

    auto visible_in_right = [&](const Eigen::Vector3d& X) -> std::optional<Eigen::Vector2d> {
        const auto m = right.project(X);
        if (!m || m->x() < 0 || m->y() < 0 || m->x() > w - 1 || m->y() > h - 1) return std::nullopt;
        const Eigen::Vector3d dir = right.ray(m->x(), m->y());
        const Eigen::Vector3d Q = right.C + sc.hit(right.C, dir) * dir;
        if ((Q - X).norm() > 1e-7 * X.norm()) return std::nullopt;
        return m;
    };

    s.truth = empty_truth(w, h);
    s.truth_depth = depth::DepthMap(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const Eigen::Vector3d dir = left.ray(x, y);
            const Eigen::Vector3d X = sc.hit(left.C, dir) * dir;
            const std::size_t i = std::size_t(y) * w + x;
            s.truth_depth.depth[i] = X.z();
            s.truth_depth.valid[i] = 1;
            if (!with_tiepoints && visible_in_right(X)) {
                s.truth.labels[i] = int(std::lround(p.focal_length * p.baseline / X.z()));
                s.truth.valid[i] = 1;
            }
        }

    const Eigen::Vector3d t = -R * right.C;
    s.F = K.inverse().transpose() * skew(t) * R * K.inverse();
    s.surface = {{"type", "sphere_over_plane"},
                 {"sphere_centre", {0.0, 0.0, p.sphere_depth}},
                 {"sphere_radius", p.sphere_radius},
                 {"background_depth", p.background_depth},
                 {"focal_length", p.focal_length},
                 {"baseline", p.baseline},
                 {"right_yaw_deg", yaw_deg}};

    if (with_tiepoints) {
        std::mt19937_64 rng(mix(p.seed ^ 0x7469657074ULL));
        std::uniform_real_distribution<double> ux(0.02 * w, 0.98 * w), uy(0.02 * h, 0.98 * h);
        const int want = p.tiepoint_count;
        for (int attempt = 0; attempt < 100 * want && int(s.tiepoints.pairs.size()) < want; ++attempt) {
            const double x = ux(rng), y = uy(rng);
            const Eigen::Vector3d dir = left.ray(x, y);
            const Eigen::Vector3d X = sc.hit(left.C, dir) * dir;
            const auto m = visible_in_right(X);
            if (!m) continue;
            const auto back = left.project(X);
            s.tiepoints.pairs.push_back({*back, *m, true, 1.0});
        }
        if (int(s.tiepoints.pairs.size()) < want) throw SceneError("scene: could not place the requested tie points");
    }
    return s;
}

}  // namespace

Scene generate_scene(SceneKind kind, const SceneParams& p) {
    p.validate(kind);
    Scene s;
    switch (kind) {
    case SceneKind::ShiftedTexture: s = shifted_texture(p); break;
    case SceneKind::TwoPlane: s = two_plane(p); break;
    case SceneKind::SpherePatch: s = ray_cast(p, 0.0, false); break;
    case SceneKind::RotatedCameraPair: s = ray_cast(p, p.rotation_deg, true); break;
    }
    if (kind == SceneKind::ShiftedTexture || kind == SceneKind::TwoPlane) {
        Eigen::Matrix3d K;
        K << 1, 0, 0, 0, 1, 0, 0, 0, 1;
        s.F = rectified_F(K, 1.0);
    }
    s.kind = kind;
    s.params = p;
    return s;
}

void save_scene(const Scene& scene, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    imgcore::save_image(scene.left, dir / "left.png");
    imgcore::save_image(scene.right, dir / "right.png");
    imgcore::save_pfm(scene.left, dir / "left.pfm");
    imgcore::save_pfm(scene.right, dir / "right.pfm");
    gcstereo::save_disparity_pfm(scene.truth, dir / "truth_disparity.pfm");
    if (!scene.truth_depth.depth.empty()) depth::save_depth_pfm(scene.truth_depth, dir / "truth_depth.pfm");
    if (!scene.tiepoints.pairs.empty()) tiepoints::write_tiepoints(scene.tiepoints, dir / "tiepoints.txt");
    const SceneParams& p = scene.params;
    nlohmann::json j;
    j["kind"] = to_string(scene.kind);
    j["width"] = p.width;
    j["height"] = p.height;
    j["seed"] = p.seed;
    j["contrast"] = p.contrast;
    j["texture_cell"] = p.texture_cell;
    j["surface"] = scene.surface;
    Eigen::Matrix3d Ft = scene.F.transpose();
    j["F"] = std::vector<double>(Ft.data(), Ft.data() + 9);
    if (scene.rig.focal_length > 0) j["rig"] = {{"focal_length", scene.rig.focal_length}, {"baseline", scene.rig.baseline}};
    std::ofstream out(dir / "scene.json");
    if (!out) throw SceneError("cannot write " + (dir / "scene.json").string());
    out << j.dump(2) << '\n';
}

RasterImage degrade_scene(const RasterImage& img, const DegradeParams& p) {
    if (img.empty()) throw SceneError("degrade_scene: empty image");
    if (!(p.noise_sigma >= 0.0)) throw SceneError("degrade_scene: noise_sigma must be >= 0");
    RasterImage out = img;
    const int w = img.width();
    for (int c = 0; c < img.channels(); ++c) {
        const double cast = p.color_cast[std::size_t(c)];
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < w; ++x) {
                const double ramp = w > 1 ? p.ramp_start + (p.ramp_end - p.ramp_start) * x / double(w - 1) : p.ramp_start;
                out.at(x, y, c) = img.at(x, y, c) * ramp * cast;
            }
    }
    if (p.noise_sigma > 0.0) {
        std::mt19937_64 rng(p.seed);
        std::normal_distribution<double> n(0.0, p.noise_sigma);
        for (double& v : out.samples()) v += n(rng);
    }
    return out;
}

}  // namespace uwr::cli
