#include "uwr/rectify.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace uwr::rectify {

std::array<double, 6> RectificationParams::to_array() const {
    return {left_y, left_z, right_x, right_y, right_z, alpha_prime};
}

RectificationParams RectificationParams::from_array(const std::array<double, 6>& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

Eigen::Matrix3d skew_u1() {
    Eigen::Matrix3d m;
    m << 0, 0, 0, 0, 0, -1, 0, 1, 0;
    return m;
}

double sampson_error(const Eigen::Vector3d& left, const Eigen::Vector3d& right,
                     const Eigen::Matrix3d& F) {
    const Eigen::Vector3d fl = F * left;
    const Eigen::Vector3d fr = F.transpose() * right;
    const double num = right.dot(fl);
    const double den = fl(0) * fl(0) + fl(1) * fl(1) + fr(0) * fr(0) + fr(1) * fr(1);
    if (den == 0.0) {
        if (num == 0.0) return 0.0;
        throw RectifyError("sampson_error: degenerate epipolar geometry (zero gradient)");
    }
    return num * num / den;
}

double sampson_error(const Eigen::Vector2d& left, const Eigen::Vector2d& right,
                     const Eigen::Matrix3d& F) {
    return sampson_error(Eigen::Vector3d(left.homogeneous()), Eigen::Vector3d(right.homogeneous()), F);
}

Eigen::Matrix3d rotation_xyz(double x, double y, double z) {
    const double cx = std::cos(x), sx = std::sin(x);
    const double cy = std::cos(y), sy = std::sin(y);
    const double cz = std::cos(z), sz = std::sin(z);
    Eigen::Matrix3d Rx, Ry, Rz;
    Rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
    Ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
    Rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
    return Rx * Ry * Rz;
}

double focal_from_alpha_prime(double alpha_prime, int width, int height) {
    return double(width + height) * std::pow(3.0, alpha_prime);
}

Eigen::Matrix3d guessed_intrinsics(double alpha_prime, int width, int height) {
    const double a = focal_from_alpha_prime(alpha_prime, width, height);
    Eigen::Matrix3d K;
    K << a, 0, width / 2.0, 0, a, height / 2.0, 0, 0, 1;
    return K;
}

namespace {

Eigen::Matrix3d inverse_intrinsics(const Eigen::Matrix3d& K) {
    const double a = K(0, 0);
    Eigen::Matrix3d Ki;
    Ki << 1 / a, 0, -K(0, 2) / a, 0, 1 / a, -K(1, 2) / a, 0, 0, 1;
    return Ki;
}

}  // namespace

Eigen::Matrix3d build_F(const RectificationParams& p, int width, int height) {
    const Eigen::Matrix3d Ki = inverse_intrinsics(guessed_intrinsics(p.alpha_prime, width, height));
    const Eigen::Matrix3d Rl = rotation_xyz(0.0, p.left_y, p.left_z);
    const Eigen::Matrix3d Rr = rotation_xyz(p.right_x, p.right_y, p.right_z);
    return Ki.transpose() * Rr.transpose() * skew_u1() * Rl * Ki;
}

Eigen::Vector2d apply_homography(const Eigen::Matrix3d& H, const Eigen::Vector2d& p) {
    const Eigen::Vector3d q = H * p.homogeneous();
    return q.hnormalized();
}

RectificationModel RectificationModel::identity(int width, int height) {
    RectificationModel m;
    m.width = width;
    m.height = height;
    m.K_old = guessed_intrinsics(0.0, width, height);
    m.K_new_left = m.K_old;
    m.K_new_right = m.K_old;
    return m;
}

}  // namespace uwr::rectify
