#pragma once

#include "uwr/imgcore.hpp"
#include "uwr/tiepoints.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

// Quasi-Euclidean rectification of an uncalibrated pair. Both cameras are
// modelled as K R K^-1 collineations with a shared guessed focal length; five
// rotation angles and the log-focal are fitted to the tie points by
// Levenberg-Marquardt on the Sampson error.
namespace uwr::rectify {

using imgcore::RasterImage;
using tiepoints::TiePointSet;

class RectifyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unknowns in optimisation order.
struct RectificationParams {
    double left_y = 0.0;
    double left_z = 0.0;
    double right_x = 0.0;
    double right_y = 0.0;
    double right_z = 0.0;
    double alpha_prime = 0.0;  // focal = (w + h) * 3^alpha_prime

    std::array<double, 6> to_array() const;
    static RectificationParams from_array(const std::array<double, 6>& v);
};

// Fundamental matrix of a rectified pair, [u1]x for u1 = (1, 0, 0).
Eigen::Matrix3d skew_u1();

// Squared Sampson error of m_r^T F m_l = 0 for homogeneous points.
// Throws when the gradient vanishes but the algebraic residual does not.
double sampson_error(const Eigen::Vector3d& left, const Eigen::Vector3d& right,
                     const Eigen::Matrix3d& F);
double sampson_error(const Eigen::Vector2d& left, const Eigen::Vector2d& right,
                     const Eigen::Matrix3d& F);

// R = Rx(x) Ry(y) Rz(z)
Eigen::Matrix3d rotation_xyz(double x, double y, double z);

double focal_from_alpha_prime(double alpha_prime, int width, int height);

// Zero skew, unit aspect, principal point at (w/2, h/2).
Eigen::Matrix3d guessed_intrinsics(double alpha_prime, int width, int height);

// F = K^-T R_r^T [u1]x R_l K^-1 with the left X rotation fixed at zero.
Eigen::Matrix3d build_F(const RectificationParams& p, int width, int height);

struct LmOptions {
    double jacobian_step = 1e-6;
    double initial_damping = 1e-3;
    double damping_factor = 10.0;
    double relative_tolerance = 1e-10;
    int max_iterations = 200;
};

struct EstimateOptions {
    LmOptions lm;
    std::uint64_t restart_seed = 0;
};

struct RectificationModel {
    int width = 0;
    int height = 0;
    Eigen::Matrix3d H_left = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d H_right = Eigen::Matrix3d::Identity();
    RectificationParams params;
    Eigen::Matrix3d K_old = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d K_new_left = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d K_new_right = Eigen::Matrix3d::Identity();
    double residual_rms = 0.0;  // RMS Sampson distance over inliers, pixels
    int iterations = 0;
    int restarts = 0;
    bool alpha_fixed = false;   // focal pinned after alpha' left [-1, 1] twice

    static RectificationModel identity(int width, int height);
};

RectificationModel estimate_rectification(const TiePointSet& pts, int width, int height,
                                          const EstimateOptions& opt = {});

struct Box {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0, x1) x [y0, y1)

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    bool empty() const { return x1 <= x0 || y1 <= y0; }
};

struct RectifiedPair {
    RasterImage left;
    RasterImage right;
    RectificationModel model;
    Box valid_left;
    Box valid_right;
};

Eigen::Vector2d apply_homography(const Eigen::Matrix3d& H, const Eigen::Vector2d& p);

// Inverse-mapped bilinear warp onto a canvas of the source size. Pixels whose
// preimage falls outside the source are 0; `valid` receives the largest
// axis-aligned box of mapped pixels found by shrinking their bounding box.
RasterImage warp_image(const RasterImage& img, const Eigen::Matrix3d& H, Box* valid = nullptr);

RectifiedPair warp_pair(const RasterImage& left, const RasterImage& right,
                        const RectificationModel& model);

// Tie points mapped through the model's collineations.
TiePointSet rectify_tiepoints(const TiePointSet& pts, const RectificationModel& model);

// RMS of y_left - y_right over inlier pairs.
double vertical_disparity_rms(const TiePointSet& pts);

std::string model_to_json(const RectificationModel& model);
RectificationModel model_from_json(const std::string& text);
void save_model(const RectificationModel& model, const std::filesystem::path& path);
RectificationModel load_model(const std::filesystem::path& path);

}  // namespace uwr::rectify
