#include "uwr/enhance.hpp"

#include <algorithm>
#include <cmath>

namespace uwr::enhance {

using imgcore::ColorSpace;
using imgcore::ImageError;

namespace {

// Linear-interpolated quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * double(sorted.size() - 1);
    const std::size_t lo = std::size_t(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double t = pos - double(lo);
    return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

double channel_mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

}  // namespace

RasterImage adjust_intensity(const RasterImage& img, const IntensityAdjustParams& p) {
    p.validate();
    if (img.colorspace() != ColorSpace::Gray)
        throw ImageError("adjust_intensity: expected a gray image");
    if (img.empty())
        return img;
    std::vector<double> sorted(img.samples().begin(), img.samples().end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back())
        return img;
    double lo = quantile(sorted, p.low_clip_fraction);
    double hi = quantile(sorted, 1.0 - p.high_clip_fraction);
    if (!(hi > lo)) {
        lo = sorted.front();
        hi = sorted.back();
    }
    const double scale = 1.0 / (hi - lo);
    RasterImage out = img;
    for (double& v : out.samples())
        v = std::clamp((v - lo) * scale, 0.0, 1.0);
    return out;
}

RasterImage equalize_color_means(const RasterImage& img) {
    if (img.colorspace() != ColorSpace::RGB)
        throw ImageError("equalize_color_means: expected an RGB image");
    double means[3];
    for (int c = 0; c < 3; ++c)
        means[c] = channel_mean(img.plane(c));
    const double grand = (means[0] + means[1] + means[2]) / 3.0;
    RasterImage out = img;
    for (int c = 0; c < 3; ++c) {
        const double gain = means[c] != 0.0 ? grand / means[c] : 1.0;
        for (double& v : out.plane(c))
            v = std::clamp(v * gain, 0.0, 1.0);
    }
    return out;
}

}  // namespace uwr::enhance
