#include "uwr/rectify.hpp"
#include "uwr/tiepoints.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace uwr::tiepoints {
namespace {

// Hartley conditioning: centroid to origin, mean distance sqrt(2).
Eigen::Matrix3d conditioning(const std::vector<Eigen::Vector2d>& pts) {
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& p : pts) c += p;
    c /= double(pts.size());
    double d = 0.0;
    for (const auto& p : pts) d += (p - c).norm();
    d /= double(pts.size());
    const double s = d > 0.0 ? std::sqrt(2.0) / d : 1.0;
    Eigen::Matrix3d T;
    T << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
    return T;
}

double sampson_distance(const TiePoint& p, const Eigen::Matrix3d& F) {
    try {
        return std::sqrt(rectify::sampson_error(p.left, p.right, F));
    } catch (const rectify::RectifyError&) {
        return std::numeric_limits<double>::infinity();
    }
}

std::vector<bool> classify(const std::vector<TiePoint>& pairs, const Eigen::Matrix3d& F,
                           double threshold, std::size_t& count) {
    std::vector<bool> mask(pairs.size());
    count = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        mask[i] = sampson_distance(pairs[i], F) <= threshold;
        count += mask[i];
    }
    return mask;
}

}  // namespace

Eigen::Matrix3d fundamental_8point(const std::vector<TiePoint>& pairs) {
    if (pairs.size() < 8) throw TiePointError("fundamental_8point: need at least 8 pairs");
    std::vector<Eigen::Vector2d> l, r;
    for (const auto& p : pairs) {
        l.push_back(p.left);
        r.push_back(p.right);
    }
    const Eigen::Matrix3d Tl = conditioning(l), Tr = conditioning(r);
    Eigen::MatrixXd A(pairs.size(), 9);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Eigen::Vector3d a = Tl * l[i].homogeneous();
        const Eigen::Vector3d b = Tr * r[i].homogeneous();
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) A(Eigen::Index(i), 3 * j + k) = b(j) * a(k);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const Eigen::VectorXd f = svd.matrixV().col(8);
    Eigen::Matrix3d Fn;
    Fn << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);

    Eigen::JacobiSVD<Eigen::Matrix3d> s2(Fn, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector3d sv = s2.singularValues();
    sv(2) = 0.0;
    Fn = s2.matrixU() * sv.asDiagonal() * s2.matrixV().transpose();
    Eigen::Matrix3d F = Tr.transpose() * Fn * Tl;
    const double n = F.norm();
    return n > 0.0 ? Eigen::Matrix3d(F / n) : F;
}

TiePointSet reject_outliers(const TiePointSet& pts, const ConsensusOptions& opt) {
    const auto& pairs = pts.pairs;
    const std::size_t n = pairs.size();
    if (n < std::size_t(kMinPairs)) throw TiePointError("reject_outliers: need at least 8 pairs");
    if (!(opt.threshold >= 0.0) || opt.max_iterations < 1 || !(opt.confidence > 0.0 && opt.confidence < 1.0))
        throw TiePointError("reject_outliers: invalid options");

    std::mt19937_64 rng(opt.seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);

    std::vector<bool> best_mask;
    std::size_t best_count = 0;
    long needed = opt.max_iterations;
    for (long it = 0; it < needed && it < opt.max_iterations; ++it) {
        // Partial Fisher-Yates: the first 8 entries become the sample.
        for (std::size_t k = 0; k < 8; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, n - 1);
            std::swap(idx[k], idx[pick(rng)]);
        }
        std::vector<TiePoint> sample;
        for (std::size_t k = 0; k < 8; ++k) sample.push_back(pairs[idx[k]]);
        const Eigen::Matrix3d F = fundamental_8point(sample);
        if (!F.allFinite()) continue;
        std::size_t count = 0;
        auto mask = classify(pairs, F, opt.threshold, count);
        if (count > best_count) {
            best_count = count;
            best_mask = std::move(mask);
            const double w = double(count) / double(n);
            const double miss = 1.0 - std::pow(w, 8.0);
            if (miss <= 0.0) {
                needed = it + 1;
            } else {
                const double k = std::log(1.0 - opt.confidence) / std::log(miss);
                if (std::isfinite(k)) needed = std::min<long>(opt.max_iterations, long(std::ceil(k)));
            }
        }
    }
    if (best_count < std::size_t(kMinPairs))
        throw TiePointError("reject_outliers: consensus support " + std::to_string(best_count) +
                            " is below 8");

    // Refit on the consensus set; keep the refit only if it does not lose support.
    std::vector<TiePoint> support;
    for (std::size_t i = 0; i < n; ++i)
        if (best_mask[i]) support.push_back(pairs[i]);
    const Eigen::Matrix3d F = fundamental_8point(support);
    std::size_t refit_count = 0;
    auto refit_mask = classify(pairs, F, opt.threshold, refit_count);
    if (F.allFinite() && refit_count >= best_count) best_mask = std::move(refit_mask);

    TiePointSet out = pts;
    for (std::size_t i = 0; i < n; ++i) out.pairs[i].inlier = best_mask[i];
    return out;
}

}  // namespace uwr::tiepoints
