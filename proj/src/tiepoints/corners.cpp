#include "uwr/tiepoints.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uwr::tiepoints {
namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int r = std::max(1, int(std::ceil(3.0 * sigma)));
    std::vector<double> k(std::size_t(2 * r + 1));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[std::size_t(i + r)] = std::exp(-0.5 * double(i * i) / (sigma * sigma));
        sum += k[std::size_t(i + r)];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable blur with clamp-to-edge borders.
std::vector<double> blur(const std::vector<double>& f, int w, int h, const std::vector<double>& k) {
    const int r = int(k.size() / 2);
    std::vector<double> tmp(f.size()), out(f.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) {
                const int xx = std::clamp(x + i, 0, w - 1);
                s += k[std::size_t(i + r)] * f[std::size_t(y) * w + xx];
            }
            tmp[std::size_t(y) * w + x] = s;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) {
                const int yy = std::clamp(y + i, 0, h - 1);
                s += k[std::size_t(i + r)] * tmp[std::size_t(yy) * w + x];
            }
            out[std::size_t(y) * w + x] = s;
        }
    return out;
}

double parabola_offset(double left, double centre, double right) {
    const double denom = left - 2.0 * centre + right;
    if (denom >= 0.0) return 0.0;
    return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

std::size_t TiePointSet::inlier_count() const {
    return std::size_t(std::count_if(pairs.begin(), pairs.end(),
                                     [](const TiePoint& p) { return p.inlier; }));
}

std::vector<TiePoint> TiePointSet::inliers() const {
    std::vector<TiePoint> out;
    for (const auto& p : pairs)
        if (p.inlier) out.push_back(p);
    return out;
}

std::vector<Corner> detect_corners(const RasterImage& gray, const CornerOptions& opt) {
    if (gray.channels() != 1) throw TiePointError("detect_corners: expected a single-channel image");
    if (opt.max_count < 1 || opt.min_spacing < 0.0 || opt.sigma <= 0.0)
        throw TiePointError("detect_corners: invalid options");
    const int w = gray.width(), h = gray.height();
    if (w < 3 || h < 3) throw TiePointError("detect_corners: image too small");

    const auto src = gray.plane(0);
    auto px = [&](int x, int y) { return src[std::size_t(y) * w + x]; };
    const std::size_t n = gray.pixel_count();
    std::vector<double> ixx(n), iyy(n), ixy(n);
    // Central differences; one-sided at the border.
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
            const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
            const double gx = (px(xr, y) - px(xl, y)) / double(xr - xl);
            const double gy = (px(x, yd) - px(x, yu)) / double(yd - yu);
            const std::size_t i = std::size_t(y) * w + x;
            ixx[i] = gx * gx;
            iyy[i] = gy * gy;
            ixy[i] = gx * gy;
        }
    const auto kernel = gaussian_kernel(opt.sigma);
    ixx = blur(ixx, w, h, kernel);
    iyy = blur(iyy, w, h, kernel);
    ixy = blur(ixy, w, h, kernel);

    std::vector<double> resp(n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double tr = ixx[i] + iyy[i];
        resp[i] = ixx[i] * iyy[i] - ixy[i] * ixy[i] - opt.k * tr * tr;
        peak = std::max(peak, resp[i]);
    }
    if (!(peak > 0.0)) throw TiePointError("detect_corners: no corner response (untextured input)");
    const double floor = opt.relative_threshold * peak;
    auto R = [&](int x, int y) { return resp[std::size_t(y) * w + x]; };

    struct Candidate {
        int x, y;
        double r;
    };
    std::vector<Candidate> cand;
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x) {
            const double r = R(x, y);
            if (r <= floor) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const double q = R(x + dx, y + dy);
                    // Ties are broken towards the raster-earlier pixel.
                    if (q > r || (q == r && (dy < 0 || (dy == 0 && dx < 0)))) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) cand.push_back({x, y, r});
        }
    std::stable_sort(cand.begin(), cand.end(),
                     [](const Candidate& a, const Candidate& b) { return a.r > b.r; });

    std::vector<Corner> out;
    const double min_d2 = opt.min_spacing * opt.min_spacing;
    for (const auto& c : cand) {
        if (int(out.size()) >= opt.max_count) break;
        const Eigen::Vector2d p(c.x + parabola_offset(R(c.x - 1, c.y), c.r, R(c.x + 1, c.y)),
                                c.y + parabola_offset(R(c.x, c.y - 1), c.r, R(c.x, c.y + 1)));
        const bool spaced = std::all_of(out.begin(), out.end(), [&](const Corner& o) {
            return (o.position - p).squaredNorm() >= min_d2;
        });
        if (spaced) out.push_back({p, c.r});
    }
    if (int(out.size()) < opt.min_count)
        throw TiePointError("detect_corners: only " + std::to_string(out.size()) +
                            " corners found (untextured input)");
    return out;
}

std::vector<Corner> detect_corners(const RasterImage& gray, int max_count, double min_spacing) {
    CornerOptions opt;
    opt.max_count = max_count;
    opt.min_spacing = min_spacing;
    return detect_corners(gray, opt);
}

}  // namespace uwr::tiepoints
