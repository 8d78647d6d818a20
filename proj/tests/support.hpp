#pragma once

// Shared fixtures and independent oracles for the test suites.

#include "uwr/imgcore.hpp"
#include "uwr/tiepoints.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace uwr::testing {

using imgcore::RasterImage;

inline RasterImage random_gray(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    RasterImage img = RasterImage::gray(w, h);
    for (double& v : img.samples())
        v = u(rng);
    return img;
}

inline RasterImage random_rgb(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RasterImage img = RasterImage::rgb(w, h);
    for (double& v : img.samples())
        v = u(rng);
    return img;
}

inline RasterImage gaussian_noise(int w, int h, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, sigma);
    RasterImage img = RasterImage::gray(w, h);
    for (double& v : img.samples())
        v = n(rng);
    return img;
}

// Smooth value noise with lattice spacing `cell`, bilinear-interpolated,
// in [0.5 - amp, 0.5 + amp].
inline RasterImage smooth_texture(int w, int h, double cell, double amp, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int gw = int(w / cell) + 3, gh = int(h / cell) + 3;
    std::vector<double> lattice(std::size_t(gw) * gh);
    for (double& v : lattice)
        v = u(rng);
    RasterImage img = RasterImage::gray(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double fx = x / cell, fy = y / cell;
            const int ix = int(fx), iy = int(fy);
            const double tx = fx - ix, ty = fy - iy;
            auto L = [&](int a, int b) { return lattice[std::size_t(b) * gw + a]; };
            const double v = (1 - tx) * (1 - ty) * L(ix, iy) + tx * (1 - ty) * L(ix + 1, iy) +
                             (1 - tx) * ty * L(ix, iy + 1) + tx * ty * L(ix + 1, iy + 1);
            img.at(x, y) = 0.5 + amp * v;
        }
    return img;
}

inline double rms_diff(const RasterImage& a, const RasterImage& b) {
    double s = 0.0;
    auto x = a.samples(), y = b.samples();
    for (std::size_t i = 0; i < x.size(); ++i)
        s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s / double(x.size()));
}

inline double max_abs_diff(const RasterImage& a, const RasterImage& b) {
    double m = 0.0;
    auto x = a.samples(), y = b.samples();
    for (std::size_t i = 0; i < x.size(); ++i)
        m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

inline double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / double(v.size());
}

inline double variance_of(std::span<const double> v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return s / double(v.size());
}

// Power spectrum via a direct separable DFT (no FFT library), used as an
// independent oracle for the frequency-domain filters. O(n^3).
inline std::vector<double> power_spectrum(const RasterImage& img) {
    const int w = img.width(), h = img.height();
    using C = std::complex<double>;
    auto twiddles = [](int n) {
        std::vector<C> table(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k)
            table[std::size_t(k)] = std::polar(1.0, -2.0 * std::numbers::pi * k / n);
        return table;
    };
    const auto tw = twiddles(w), th = twiddles(h);
    std::vector<C> rows(std::size_t(w) * h);
    for (int y = 0; y < h; ++y)
        for (int k = 0; k < w; ++k) {
            C s = 0.0;
            for (int x = 0; x < w; ++x)
                s += img.at(x, y) * tw[std::size_t((long(k) * x) % w)];
            rows[std::size_t(y) * w + k] = s;
        }
    std::vector<double> power(std::size_t(w) * h);
    for (int k = 0; k < w; ++k)
        for (int l = 0; l < h; ++l) {
            C s = 0.0;
            for (int y = 0; y < h; ++y)
                s += rows[std::size_t(y) * w + k] * th[std::size_t((long(l) * y) % h)];
            power[std::size_t(l) * w + k] = std::norm(s);
        }
    return power;
}

// Multi-octave value noise rescaled to exactly [0,1]; a stand-in for a
// well-exposed natural photograph.
inline RasterImage fractal_texture(int n, std::uint64_t seed) {
    RasterImage acc = RasterImage::gray(n, n);
    double amp = 1.0;
    for (double cell = n / 4.0; cell >= 2.0; cell /= 2, amp *= 0.6) {
        RasterImage o = smooth_texture(n, n, cell, amp, seed * 100 + std::uint64_t(cell));
        for (std::size_t i = 0; i < acc.pixel_count(); ++i)
            acc.samples()[i] += o.samples()[i] - 0.5;
    }
    auto [lo, hi] = std::minmax_element(acc.samples().begin(), acc.samples().end());
    const double l = *lo, range = *hi - *lo;
    for (double& v : acc.samples())
        v = (v - l) / range;
    return acc;
}

inline int signed_freq(int k, int n) { return k <= n / 2 ? k : k - n; }

// Fraction of non-DC spectral energy at radius <= cutoff bins.
inline double low_frequency_ratio(const RasterImage& img, double cutoff) {
    const auto p = power_spectrum(img);
    double low = 0.0, total = 0.0;
    for (int l = 0; l < img.height(); ++l)
        for (int k = 0; k < img.width(); ++k) {
            if (k == 0 && l == 0)
                continue;
            const double fx = signed_freq(k, img.width()), fy = signed_freq(l, img.height());
            const double e = p[std::size_t(l) * img.width() + k];
            total += e;
            if (std::hypot(fx, fy) <= cutoff)
                low += e;
        }
    return low / total;
}

// Two pinhole cameras sharing focal f and principal point (w/2, h/2). The left
// camera sits at the origin looking down +Z; the right one is rotated by
// `yaw` about Y and displaced by `baseline` along X.
struct TwoCameraRig {
    int width = 800;
    int height = 600;
    double focal = 500.0;
    double yaw = 5.0 * std::numbers::pi / 180.0;
    double baseline = 0.1;

    Eigen::Matrix3d right_rotation() const {
        return Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()).toRotationMatrix();
    }
    Eigen::Vector2d project_left(const Eigen::Vector3d& X) const {
        return {focal * X.x() / X.z() + width / 2.0, focal * X.y() / X.z() + height / 2.0};
    }
    Eigen::Vector2d project_right(const Eigen::Vector3d& X) const {
        const Eigen::Vector3d Y = right_rotation() * (X - Eigen::Vector3d(baseline, 0, 0));
        return {focal * Y.x() / Y.z() + width / 2.0, focal * Y.y() / Y.z() + height / 2.0};
    }
    bool in_view(const Eigen::Vector2d& p) const {
        return p.x() >= 0 && p.y() >= 0 && p.x() <= width - 1 && p.y() <= height - 1;
    }
    // Fundamental matrix with m_r^T F m_l = 0, from the known geometry.
    Eigen::Matrix3d fundamental() const {
        Eigen::Matrix3d K;
        K << focal, 0, width / 2.0, 0, focal, height / 2.0, 0, 0, 1;
        const Eigen::Matrix3d R = right_rotation();
        const Eigen::Vector3d t = -R * Eigen::Vector3d(baseline, 0, 0);
        Eigen::Matrix3d tx;
        tx << 0, -t.z(), t.y(), t.z(), 0, -t.x(), -t.y(), t.x(), 0;
        const Eigen::Matrix3d Ki = K.inverse();
        return Ki.transpose() * tx * R * Ki;
    }

    // `count` exact correspondences of random points at depth [1, 2] m.
    tiepoints::TiePointSet exact_pairs(int count, std::uint64_t seed) const {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        tiepoints::TiePointSet out;
        while (int(out.pairs.size()) < count) {
            const double z = 1.0 + u(rng);
            const double px = (u(rng) * 0.96 + 0.02) * width, py = (u(rng) * 0.96 + 0.02) * height;
            const Eigen::Vector3d X((px - width / 2.0) * z / focal, (py - height / 2.0) * z / focal, z);
            const Eigen::Vector2d l = project_left(X), r = project_right(X);
            if (!in_view(l) || !in_view(r)) continue;
            out.pairs.push_back({l, r, true, 1.0});
        }
        return out;
    }
};

}  // namespace uwr::testing
