#include "uwr/rectify.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace uwr::rectify {
namespace {

// Shrinks the bounding box of valid pixels one side at a time (the side with
// the most invalid pixels first) until every pixel inside is valid.
Box largest_valid_box(const std::vector<unsigned char>& mask, int w, int h) {
    Box b{w, h, 0, 0};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask[std::size_t(y) * w + x]) {
                b.x0 = std::min(b.x0, x);
                b.y0 = std::min(b.y0, y);
                b.x1 = std::max(b.x1, x + 1);
                b.y1 = std::max(b.y1, y + 1);
            }
    if (b.empty()) return {};
    auto bad_row = [&](int y) {
        int n = 0;
        for (int x = b.x0; x < b.x1; ++x) n += !mask[std::size_t(y) * w + x];
        return n;
    };
    auto bad_col = [&](int x) {
        int n = 0;
        for (int y = b.y0; y < b.y1; ++y) n += !mask[std::size_t(y) * w + x];
        return n;
    };
    while (!b.empty()) {
        const double top = double(bad_row(b.y0)) / b.width();
        const double bottom = double(bad_row(b.y1 - 1)) / b.width();
        const double lft = double(bad_col(b.x0)) / b.height();
        const double rgt = double(bad_col(b.x1 - 1)) / b.height();
        const double worst = std::max({top, bottom, lft, rgt});
        if (worst == 0.0) return b;
        if (worst == top) ++b.y0;
        else if (worst == bottom) --b.y1;
        else if (worst == lft) ++b.x0;
        else --b.x1;
    }
    return {};
}

}  // namespace

RasterImage warp_image(const RasterImage& img, const Eigen::Matrix3d& H, Box* valid) {
    if (img.empty()) throw RectifyError("warp_image: empty image");
    if (!H.allFinite() || std::abs(H.determinant()) < 1e-12)
        throw RectifyError("warp_image: degenerate homography");
    const Eigen::Matrix3d Hi = H.inverse();
    const int w = img.width(), h = img.height(), nc = img.channels();
    RasterImage out(w, h, img.colorspace(), 0.0);
    std::vector<unsigned char> mask(img.pixel_count(), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const Eigen::Vector3d q = Hi * Eigen::Vector3d(x, y, 1.0);
            if (!(q(2) != 0.0)) continue;
            const double sx = q(0) / q(2), sy = q(1) / q(2);
            if (!(sx >= 0.0 && sy >= 0.0 && sx <= w - 1 && sy <= h - 1)) continue;
            const int x0 = int(std::floor(sx)), y0 = int(std::floor(sy));
            const double fx = sx - x0, fy = sy - y0;
            const int x1 = fx > 0.0 ? x0 + 1 : x0, y1 = fy > 0.0 ? y0 + 1 : y0;
            for (int c = 0; c < nc; ++c) {
                double v;
                if (fx == 0.0 && fy == 0.0) {
                    v = img.at(x0, y0, c);
                } else {
                    const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
                    const double bot = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
                    v = (1.0 - fy) * top + fy * bot;
                }
                out.at(x, y, c) = v;
            }
            mask[std::size_t(y) * w + x] = 1;
        }
    if (valid) *valid = largest_valid_box(mask, w, h);
    return out;
}

RectifiedPair warp_pair(const RasterImage& left, const RasterImage& right,
                        const RectificationModel& model) {
    if (!left.same_shape(right)) throw RectifyError("warp_pair: images differ in shape");
    RectifiedPair out;
    out.model = model;
    out.left = warp_image(left, model.H_left, &out.valid_left);
    out.right = warp_image(right, model.H_right, &out.valid_right);
    return out;
}

TiePointSet rectify_tiepoints(const TiePointSet& pts, const RectificationModel& model) {
    TiePointSet out = pts;
    for (auto& p : out.pairs) {
        p.left = apply_homography(model.H_left, p.left);
        p.right = apply_homography(model.H_right, p.right);
    }
    return out;
}

double vertical_disparity_rms(const TiePointSet& pts) {
    double acc = 0.0;
    std::size_t n = 0;
    for (const auto& p : pts.pairs) {
        if (!p.inlier) continue;
        const double d = p.left.y() - p.right.y();
        acc += d * d;
        ++n;
    }
    return n ? std::sqrt(acc / double(n)) : 0.0;
}

}  // namespace uwr::rectify
