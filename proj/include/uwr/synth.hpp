#pragma once

#include "uwr/depth.hpp"
#include "uwr/gcstereo.hpp"
#include "uwr/imgcore.hpp"
#include "uwr/tiepoints.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

// Synthetic stereo scenes with exact ground truth, and a simple underwater
// degradation model.
namespace uwr::cli {

using imgcore::RasterImage;

class SceneError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SceneKind { ShiftedTexture, TwoPlane, SpherePatch, RotatedCameraPair };

SceneKind scene_kind_from_string(const std::string& s);
const char* to_string(SceneKind k);

struct SceneParams {
    int width = 128;
    int height = 128;
    std::uint64_t seed = 0;
    double contrast = 0.45;     // texture amplitude about mid-grey
    double texture_cell = 2.0;  // lattice spacing in pixels (at the background depth for 3D scenes)

    int shift = 5;  // shifted_texture

    // two_plane: columns x >= boundary belong to the nearer plane
    int background_disparity = 3;
    int foreground_disparity = 8;
    int boundary = -1;  // -1: width / 2

    // sphere_patch and rotated_camera_pair (metres, pixels, degrees)
    double focal_length = 200.0;
    double baseline = 0.1;
    double sphere_radius = 1.2;
    double sphere_depth = 2.5;  // z of the sphere centre
    double background_depth = 4.0;
    double rotation_deg = 5.0;  // right camera yaw, rotated_camera_pair only
    int tiepoint_count = 60;

    void validate(SceneKind kind) const;
};

// Left image is the reference; a truth disparity d means left(x, y) is seen at
// right(x - d, y).
struct Scene {
    SceneKind kind = SceneKind::ShiftedTexture;
    SceneParams params;
    RasterImage left;   // RGB
    RasterImage right;  // RGB
    // Integer disparity truth; invalid where the left pixel is not visible in
    // the right view. All invalid for rotated_camera_pair, which is unrectified.
    gcstereo::DisparityMap truth;
    depth::DepthMap truth_depth;  // ray-cast scenes only
    depth::CameraRig rig;
    tiepoints::TiePointSet tiepoints;  // rotated_camera_pair only
    Eigen::Matrix3d F = Eigen::Matrix3d::Zero();  // m_r^T F m_l = 0
    nlohmann::json surface;
};

Scene generate_scene(SceneKind kind, const SceneParams& p);

// Writes left/right PNG and PFM, truth_disparity.pfm, truth_depth.pfm,
// tiepoints.txt (when present) and scene.json.
void save_scene(const Scene& scene, const std::filesystem::path& dir);

struct DegradeParams {
    double ramp_start = 1.0;  // illumination gain at x = 0
    double ramp_end = 1.0;    // illumination gain at x = width - 1
    double noise_sigma = 0.0;
    std::array<double, 3> color_cast{1.0, 1.0, 1.0};  // per-channel gain
    std::uint64_t seed = 0;
};

// Illumination ramp, colour cast, then additive Gaussian noise. No clamping.
RasterImage degrade_scene(const RasterImage& img, const DegradeParams& p);

}  // namespace uwr::cli
