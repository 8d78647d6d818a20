#include "uwr/rectify.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace uwr::rectify {
namespace {

using Residuals = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LmResult {
    Eigen::VectorXd x;
    double cost = 0.0;
    int iterations = 0;
};

double sum_sq(const Eigen::VectorXd& r) {
    return r.allFinite() ? r.squaredNorm() : std::numeric_limits<double>::infinity();
}

// Levenberg-Marquardt with a forward-difference Jacobian and Marquardt
// (diagonal) damping.
LmResult levenberg_marquardt(const Residuals& f, Eigen::VectorXd x, const LmOptions& o) {
    Eigen::VectorXd r = f(x);
    double cost = sum_sq(r);
    if (!std::isfinite(cost)) throw RectifyError("estimate_rectification: non-finite initial cost");
    const Eigen::Index n = x.size();
    double lambda = o.initial_damping;
    Eigen::MatrixXd J(r.size(), n);
    bool fresh = false;
    int it = 0;
    for (; it < o.max_iterations && cost > 0.0; ++it) {
        if (!fresh) {
            for (Eigen::Index k = 0; k < n; ++k) {
                Eigen::VectorXd xp = x;
                xp(k) += o.jacobian_step;
                J.col(k) = (f(xp) - r) / o.jacobian_step;
            }
            if (!J.allFinite()) throw RectifyError("estimate_rectification: non-finite Jacobian");
            fresh = true;
        }
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        Eigen::MatrixXd Ad = A;
        for (Eigen::Index k = 0; k < n; ++k) Ad(k, k) += lambda * std::max(A(k, k), 1e-12);
        const Eigen::VectorXd step = Ad.ldlt().solve(-g);
        const Eigen::VectorXd xn = x + step;
        const Eigen::VectorXd rn = f(xn);
        const double cn = sum_sq(rn);
        if (cn < cost) {
            const double rel = (cost - cn) / cost;
            x = xn;
            r = rn;
            cost = cn;
            fresh = false;
            lambda /= o.damping_factor;
            if (rel < o.relative_tolerance) {
                ++it;
                break;
            }
        } else {
            lambda *= o.damping_factor;
            if (lambda > 1e20) break;  // no descent direction left
        }
    }
    if (!std::isfinite(cost)) throw RectifyError("estimate_rectification: LM diverged");
    return {x, cost, it};
}

struct Problem {
    std::vector<Eigen::Vector3d> left, right;
    int width, height;

    Eigen::VectorXd residuals(const RectificationParams& p) const {
        const Eigen::Matrix3d F = build_F(p, width, height);
        Eigen::VectorXd r(Eigen::Index(left.size()));
        for (std::size_t j = 0; j < left.size(); ++j) {
            const Eigen::Vector3d fl = F * left[j];
            const Eigen::Vector3d fr = F.transpose() * right[j];
            const double num = right[j].dot(fl);
            const double den = fl(0) * fl(0) + fl(1) * fl(1) + fr(0) * fr(0) + fr(1) * fr(1);
            if (den > 0.0)
                r(Eigen::Index(j)) = num / std::sqrt(den);
            else
                r(Eigen::Index(j)) = num == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
        }
        return r;
    }
};

RectificationParams from_vector(const Eigen::VectorXd& v, bool fixed_alpha) {
    return {v(0), v(1), v(2), v(3), v(4), fixed_alpha ? 0.0 : v(5)};
}

Eigen::Vector2d corner_mean(const Eigen::Matrix3d& H, int w, int h) {
    Eigen::Vector2d m = Eigen::Vector2d::Zero();
    for (const Eigen::Vector2d& c : {Eigen::Vector2d(0, 0), Eigen::Vector2d(w, 0),
                                    Eigen::Vector2d(w, h), Eigen::Vector2d(0, h)})
        m += apply_homography(H, c);
    return m / 4.0;
}

Eigen::Matrix3d translation(double dx, double dy) {
    Eigen::Matrix3d T = Eigen::Matrix3d::Identity();
    T(0, 2) = dx;
    T(1, 2) = dy;
    return T;
}

}  // namespace

RectificationModel estimate_rectification(const TiePointSet& pts, int width, int height,
                                          const EstimateOptions& opt) {
    if (width < 1 || height < 1) throw RectifyError("estimate_rectification: empty image size");
    Problem prob{{}, {}, width, height};
    for (const auto& p : pts.pairs) {
        if (!p.inlier) continue;
        prob.left.emplace_back(p.left.homogeneous());
        prob.right.emplace_back(p.right.homogeneous());
    }
    if (prob.left.size() < std::size_t(tiepoints::kMinPairs))
        throw RectifyError("estimate_rectification: fewer than 8 inlier pairs");

    auto run = [&](const Eigen::VectorXd& x0, bool fixed_alpha) {
        const Residuals f = [&](const Eigen::VectorXd& v) {
            return prob.residuals(from_vector(v, fixed_alpha));
        };
        return levenberg_marquardt(f, x0, opt.lm);
    };

    RectificationModel m;
    m.width = width;
    m.height = height;
    LmResult res = run(Eigen::VectorXd::Zero(6), false);
    int iterations = res.iterations;
    if (std::abs(res.x(5)) > 1.0) {
        std::mt19937_64 rng(opt.restart_seed);
        std::uniform_real_distribution<double> angle(-0.1, 0.1), alpha(-0.5, 0.5);
        Eigen::VectorXd x0(6);
        for (int k = 0; k < 5; ++k) x0(k) = angle(rng);
        x0(5) = alpha(rng);
        res = run(x0, false);
        iterations += res.iterations;
        m.restarts = 1;
        if (std::abs(res.x(5)) > 1.0) {
            res = run(Eigen::VectorXd::Zero(5), true);
            iterations += res.iterations;
            m.alpha_fixed = true;
        }
    }
    m.params = from_vector(res.x, m.alpha_fixed);
    m.iterations = iterations;
    m.residual_rms = std::sqrt(res.cost / double(prob.left.size()));

    m.K_old = guessed_intrinsics(m.params.alpha_prime, width, height);
    const Eigen::Matrix3d Ki = m.K_old.inverse();
    const Eigen::Matrix3d Hl = m.K_old * rotation_xyz(0.0, m.params.left_y, m.params.left_z) * Ki;
    const Eigen::Matrix3d Hr =
        m.K_old * rotation_xyz(m.params.right_x, m.params.right_y, m.params.right_z) * Ki;
    const Eigen::Vector2d centre(width / 2.0, height / 2.0);
    const Eigen::Vector2d ml = corner_mean(Hl, width, height), mr = corner_mean(Hr, width, height);
    const double dy = centre.y() - 0.5 * (ml.y() + mr.y());
    const Eigen::Matrix3d Tl = translation(centre.x() - ml.x(), dy);
    const Eigen::Matrix3d Tr = translation(centre.x() - mr.x(), dy);
    m.K_new_left = Tl * m.K_old;
    m.K_new_right = Tr * m.K_old;
    m.H_left = Tl * Hl;
    m.H_right = Tr * Hr;
    if (std::abs(m.H_left.determinant()) < 1e-12 || std::abs(m.H_right.determinant()) < 1e-12)
        throw RectifyError("estimate_rectification: singular collineation");
    return m;
}

}  // namespace uwr::rectify
