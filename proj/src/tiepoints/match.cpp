#include "uwr/tiepoints.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uwr::tiepoints {
namespace {

// Window statistics over a single-channel image via summed-area tables.
class WindowStats {
public:
    WindowStats(const RasterImage& img, int half) : w_(img.width()), h_(img.height()), half_(half) {
        const auto src = img.plane(0);
        sum_.assign(std::size_t(w_ + 1) * (h_ + 1), 0.0);
        sq_.assign(sum_.size(), 0.0);
        for (int y = 0; y < h_; ++y) {
            double rs = 0.0, rq = 0.0;
            for (int x = 0; x < w_; ++x) {
                const double v = src[std::size_t(y) * w_ + x];
                rs += v;
                rq += v * v;
                sum_[idx(x + 1, y + 1)] = sum_[idx(x + 1, y)] + rs;
                sq_[idx(x + 1, y + 1)] = sq_[idx(x + 1, y)] + rq;
            }
        }
    }

    bool inside(int x, int y) const {
        return x - half_ >= 0 && y - half_ >= 0 && x + half_ < w_ && y + half_ < h_;
    }

    // Sum and centred sum of squares of the window at (x, y).
    std::pair<double, double> moments(int x, int y) const {
        const int x0 = x - half_, y0 = y - half_, x1 = x + half_ + 1, y1 = y + half_ + 1;
        const double s = box(sum_, x0, y0, x1, y1);
        const double q = box(sq_, x0, y0, x1, y1);
        const double n = double((2 * half_ + 1) * (2 * half_ + 1));
        return {s, std::max(0.0, q - s * s / n)};
    }

private:
    std::size_t idx(int x, int y) const { return std::size_t(y) * (w_ + 1) + x; }
    double box(const std::vector<double>& t, int x0, int y0, int x1, int y1) const {
        return t[idx(x1, y1)] - t[idx(x0, y1)] - t[idx(x1, y0)] + t[idx(x0, y0)];
    }

    int w_, h_, half_;
    std::vector<double> sum_, sq_;
};

struct Side {
    const RasterImage& img;
    WindowStats stats;
};

struct Best {
    int x = -1, y = -1;
    double ncc = -2.0;
};

constexpr double kFlat = 1e-12;

// Zero-mean template of the window at (x, y); empty if the window is flat.
std::vector<double> make_template(const Side& s, int x, int y, int half, double& norm) {
    const auto [sum, var] = s.stats.moments(x, y);
    norm = std::sqrt(var);
    if (var < kFlat) return {};
    const int side = 2 * half + 1;
    const double mean = sum / double(side * side);
    std::vector<double> t;
    t.reserve(std::size_t(side * side));
    for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx) t.push_back(s.img.at(x + dx, y + dy) - mean);
    return t;
}

// The template is zero-mean, so the window mean drops out of the numerator.
double ncc_at(const std::vector<double>& tmpl, double tnorm, const Side& s, int x, int y, int half) {
    const double var = s.stats.moments(x, y).second;
    if (var < kFlat) return 0.0;
    const int w = s.img.width();
    const auto plane = s.img.plane(0);
    double acc = 0.0;
    std::size_t k = 0;
    for (int dy = -half; dy <= half; ++dy) {
        const double* row = plane.data() + std::size_t(y + dy) * w + (x - half);
        for (int dx = 0; dx <= 2 * half; ++dx) acc += tmpl[k++] * row[dx];
    }
    return acc / (tnorm * std::sqrt(var));
}

Best search(const std::vector<double>& tmpl, double tnorm, const Side& s, int cx, int cy,
            int radius, int half) {
    Best best;
    for (int y = cy - radius; y <= cy + radius; ++y)
        for (int x = cx - radius; x <= cx + radius; ++x) {
            if (!s.stats.inside(x, y)) continue;
            const double v = ncc_at(tmpl, tnorm, s, x, y, half);
            if (v > best.ncc) best = {x, y, v};
        }
    return best;
}

double parabola_offset(double l, double c, double r) {
    const double denom = l - 2.0 * c + r;
    if (denom >= 0.0) return 0.0;
    return std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
}

}  // namespace

TiePointSet match_corners(const RasterImage& left, const RasterImage& right,
                          const std::vector<Corner>& corners, const MatchOptions& opt) {
    if (left.channels() != 1 || right.channels() != 1)
        throw TiePointError("match_corners: expected single-channel images");
    if (left.width() != right.width() || left.height() != right.height())
        throw TiePointError("match_corners: image dimensions differ");
    if (opt.window < 3 || opt.window % 2 == 0 || opt.search_radius < 0)
        throw TiePointError("match_corners: window must be odd and >= 3");
    const int half = opt.window / 2;
    const Side L{left, WindowStats(left, half)};
    const Side R{right, WindowStats(right, half)};

    TiePointSet out;
    for (const auto& c : corners) {
        const int cx = int(std::lround(c.position.x()));
        const int cy = int(std::lround(c.position.y()));
        if (!L.stats.inside(cx, cy)) continue;
        double tnorm = 0.0;
        const auto tmpl = make_template(L, cx, cy, half, tnorm);
        if (tmpl.empty()) continue;
        const Best fwd = search(tmpl, tnorm, R, cx, cy, opt.search_radius, half);
        if (fwd.x < 0 || fwd.ncc < opt.min_ncc) continue;

        double rnorm = 0.0;
        const auto back_tmpl = make_template(R, fwd.x, fwd.y, half, rnorm);
        if (back_tmpl.empty()) continue;
        const Best back = search(back_tmpl, rnorm, L, fwd.x, fwd.y, opt.search_radius, half);
        if (std::hypot(double(back.x - cx), double(back.y - cy)) > opt.symmetry_tolerance) continue;

        auto score = [&](int x, int y) {
            return R.stats.inside(x, y) ? ncc_at(tmpl, tnorm, R, x, y, half) : fwd.ncc;
        };
        // A perfect correlation is an exact integer match; the parabola would
        // only add the bias of an asymmetric correlation profile.
        const bool exact = fwd.ncc >= 1.0 - 1e-9;
        const double ox = exact ? 0.0 : parabola_offset(score(fwd.x - 1, fwd.y), fwd.ncc, score(fwd.x + 1, fwd.y));
        const double oy = exact ? 0.0 : parabola_offset(score(fwd.x, fwd.y - 1), fwd.ncc, score(fwd.x, fwd.y + 1));
        const Eigen::Vector2d shift = c.position - Eigen::Vector2d(cx, cy);
        Eigen::Vector2d rp = Eigen::Vector2d(fwd.x + ox, fwd.y + oy) + shift;
        rp.x() = std::clamp(rp.x(), 0.0, double(right.width() - 1));
        rp.y() = std::clamp(rp.y(), 0.0, double(right.height() - 1));

        TiePoint tp;
        tp.left = c.position;
        tp.right = rp;
        tp.score = std::clamp(fwd.ncc, 0.0, 1.0);
        out.pairs.push_back(tp);
    }
    std::sort(out.pairs.begin(), out.pairs.end(), [](const TiePoint& a, const TiePoint& b) {
        return a.left.y() != b.left.y() ? a.left.y() < b.left.y() : a.left.x() < b.left.x();
    });
    if (int(out.pairs.size()) < opt.min_matches)
        throw TiePointError("match_corners: only " + std::to_string(out.pairs.size()) +
                            " matches survived");
    return out;
}

}  // namespace uwr::tiepoints
