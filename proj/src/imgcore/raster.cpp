#include "uwr/imgcore.hpp"

#include <algorithm>
#include <cmath>

namespace uwr::imgcore {

const char* to_string(ColorSpace cs) {
    switch (cs) {
    case ColorSpace::RGB: return "RGB";
    case ColorSpace::YCbCr: return "YCbCr";
    case ColorSpace::Gray: return "Gray";
    }
    return "?";
}

RasterImage::RasterImage(int width, int height, ColorSpace cs, double fill)
    : width_(width), height_(height), colorspace_(cs) {
    if (width < 0 || height < 0)
        throw ImageError("negative image dimensions");
    data_.assign(std::size_t(width) * std::size_t(height) * std::size_t(channels()), fill);
}

void RasterImage::set_colorspace(ColorSpace cs) {
    if ((cs == ColorSpace::Gray) != (colorspace_ == ColorSpace::Gray))
        throw ImageError("cannot relabel between gray and 3-channel images");
    colorspace_ = cs;
}

std::span<double> RasterImage::plane(int c) {
    return std::span<double>(data_).subspan(std::size_t(c) * pixel_count(), pixel_count());
}

std::span<const double> RasterImage::plane(int c) const {
    return std::span<const double>(data_).subspan(std::size_t(c) * pixel_count(), pixel_count());
}

RasterImage RasterImage::channel(int c) const {
    if (c < 0 || c >= channels())
        throw ImageError("channel index out of range");
    RasterImage out = gray(width_, height_);
    auto src = plane(c);
    std::copy(src.begin(), src.end(), out.data_.begin());
    return out;
}

void RasterImage::set_channel(int c, const RasterImage& src) {
    if (c < 0 || c >= channels())
        throw ImageError("channel index out of range");
    if (src.channels() != 1 || src.width() != width_ || src.height() != height_)
        throw ImageError("set_channel: source must be a gray image of matching size");
    auto dst = plane(c);
    std::copy(src.data_.begin(), src.data_.end(), dst.begin());
}

bool RasterImage::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

RasterImage crop(const RasterImage& img, int x0, int y0, int width, int height) {
    if (x0 < 0 || y0 < 0 || width < 0 || height < 0 || x0 + width > img.width() ||
        y0 + height > img.height())
        throw ImageError("crop rectangle outside image");
    RasterImage out(width, height, img.colorspace());
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
    return out;
}

RasterImage clamp01(const RasterImage& img) {
    RasterImage out = img;
    for (double& v : out.samples())
        v = std::clamp(v, 0.0, 1.0);
    return out;
}

}  // namespace uwr::imgcore
