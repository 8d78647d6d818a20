#include "uwr/imgcore.hpp"

namespace uwr::imgcore {

namespace {

constexpr double kR = 0.299;
constexpr double kG = 0.587;
constexpr double kB = 0.114;
constexpr double kCb = 2.0 * (1.0 - kB);  // 1.772
constexpr double kCr = 2.0 * (1.0 - kR);  // 1.402

}  // namespace

RasterImage rgb_to_ycbcr(const RasterImage& img) {
    if (img.colorspace() != ColorSpace::RGB)
        throw ImageError(std::string("rgb_to_ycbcr: expected RGB input, got ") +
                         to_string(img.colorspace()));
    RasterImage out(img.width(), img.height(), ColorSpace::YCbCr);
    auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
    auto y = out.plane(0), cb = out.plane(1), cr = out.plane(2);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double luma = kR * r[i] + kG * g[i] + kB * b[i];
        y[i] = luma;
        cb[i] = 0.5 + (b[i] - luma) / kCb;
        cr[i] = 0.5 + (r[i] - luma) / kCr;
    }
    return out;
}

RasterImage ycbcr_to_rgb(const RasterImage& img) {
    if (img.colorspace() != ColorSpace::YCbCr)
        throw ImageError(std::string("ycbcr_to_rgb: expected YCbCr input, got ") +
                         to_string(img.colorspace()));
    RasterImage out(img.width(), img.height(), ColorSpace::RGB);
    auto y = img.plane(0), cb = img.plane(1), cr = img.plane(2);
    auto r = out.plane(0), g = out.plane(1), b = out.plane(2);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double rr = y[i] + kCr * (cr[i] - 0.5);
        const double bb = y[i] + kCb * (cb[i] - 0.5);
        r[i] = rr;
        b[i] = bb;
        g[i] = (y[i] - kR * rr - kB * bb) / kG;
    }
    return out;
}

RasterImage to_gray(const RasterImage& img) {
    switch (img.colorspace()) {
    case ColorSpace::Gray: return img;
    case ColorSpace::YCbCr: return img.channel(0);
    case ColorSpace::RGB: break;
    }
    RasterImage out = RasterImage::gray(img.width(), img.height());
    auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
    auto y = out.plane(0);
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        y[i] = kR * r[i] + kG * g[i] + kB * b[i];
    return out;
}

}  // namespace uwr::imgcore
