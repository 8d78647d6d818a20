#include "uwr/depth.hpp"

#include <algorithm>
#include <cmath>

namespace uwr::depth {

void CameraRig::validate() const {
    if (!(focal_length > 0.0) || !std::isfinite(focal_length)) throw DepthError("focal_length must be > 0");
    if (!(baseline > 0.0) || !std::isfinite(baseline)) throw DepthError("baseline must be > 0");
}

DepthMap::DepthMap(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1) throw DepthError("DepthMap: dimensions must be positive");
    depth.assign(std::size_t(w) * h, 0.0);
    valid.assign(std::size_t(w) * h, 0);
}

std::size_t DepthMap::valid_count() const {
    return std::size_t(std::count(valid.begin(), valid.end(), std::uint8_t(1)));
}

double depth_from_disparity(double d, const CameraRig& rig) {
    return rig.focal_length * rig.baseline / d;
}

double disparity_from_depth(double z, const CameraRig& rig) {
    return rig.focal_length * rig.baseline / z;
}

DepthMap triangulate_depth(const gcstereo::DisparityMap& disp, const CameraRig& rig) {
    rig.validate();
    DepthMap dm(disp.width, disp.height);
    for (std::size_t i = 0; i < disp.labels.size(); ++i) {
        const int d = disp.labels[i];
        if (!disp.valid[i] || d <= 0) continue;
        dm.depth[i] = depth_from_disparity(double(d), rig);
        dm.valid[i] = 1;
    }
    return dm;
}

DepthMap smooth_depth(const DepthMap& dm, int window) {
    if (window < 1 || window % 2 == 0) throw DepthError("smooth_depth: window must be odd and >= 1");
    if (window == 1) return dm;
    const int r = window / 2;
    DepthMap out(dm.width, dm.height);
    std::vector<double> buf;
    buf.reserve(std::size_t(window) * window);
    for (int y = 0; y < dm.height; ++y)
        for (int x = 0; x < dm.width; ++x) {
            buf.clear();
            for (int v = std::max(0, y - r); v <= std::min(dm.height - 1, y + r); ++v)
                for (int u = std::max(0, x - r); u <= std::min(dm.width - 1, x + r); ++u)
                    if (dm.is_valid(u, v)) buf.push_back(dm.at(u, v));
            if (buf.empty()) continue;
            // Lower median, so the result is always one of the inputs.
            const auto mid = buf.begin() + std::ptrdiff_t((buf.size() - 1) / 2);
            std::nth_element(buf.begin(), mid, buf.end());
            out.at(x, y) = *mid;
            out.valid[std::size_t(y) * dm.width + x] = 1;
        }
    return out;
}

Eigen::Vector3d backproject_pixel(double x, double y, double z, const CameraRig& rig, int width, int height) {
    const double cx = width / 2.0, cy = height / 2.0;
    return {(x - cx) * z / rig.focal_length, (y - cy) * z / rig.focal_length, z};
}

std::vector<Eigen::Vector3d> backproject(const DepthMap& dm, const CameraRig& rig) {
    rig.validate();
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(dm.valid_count());
    for (int y = 0; y < dm.height; ++y)
        for (int x = 0; x < dm.width; ++x)
            if (dm.is_valid(x, y)) pts.push_back(backproject_pixel(x, y, dm.at(x, y), rig, dm.width, dm.height));
    return pts;
}

void save_depth_pfm(const DepthMap& dm, const std::filesystem::path& path) {
    RasterImage img = RasterImage::gray(dm.width, dm.height);
    for (int y = 0; y < dm.height; ++y)
        for (int x = 0; x < dm.width; ++x)
            img.at(x, y) = dm.is_valid(x, y) ? dm.at(x, y) : std::numeric_limits<double>::quiet_NaN();
    imgcore::save_pfm(img, path);
}

DepthMap load_depth_pfm(const std::filesystem::path& path) {
    const RasterImage img = imgcore::load_pfm(path);
    if (img.channels() != 1) throw DepthError("load_depth_pfm: expected a single-channel PFM");
    DepthMap dm(img.width(), img.height());
    for (std::size_t i = 0; i < dm.depth.size(); ++i) {
        const double v = img.samples()[i];
        if (std::isfinite(v) && v > 0.0) {
            dm.depth[i] = v;
            dm.valid[i] = 1;
        }
    }
    return dm;
}

}  // namespace uwr::depth
