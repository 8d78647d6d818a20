#include "uwr/enhance.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>

namespace uwr::enhance {

using imgcore::ColorSpace;
using imgcore::ImageError;

double homomorphic_gain(double wx, double wy, const HomomorphicParams& p) {
    const double r2 = wx * wx + wy * wy;
    return (p.r_high - p.r_low) * (1.0 - std::exp(-r2 / (2.0 * p.cutoff_sigma * p.cutoff_sigma))) +
           p.r_low;
}

RasterImage homomorphic_filter(const RasterImage& img, const HomomorphicParams& p) {
    p.validate();
    if (img.colorspace() != ColorSpace::Gray)
        throw ImageError("homomorphic_filter: expected a gray image");
    const int w = img.width(), h = img.height();
    std::vector<double> logf(img.pixel_count());
    auto src = img.plane(0);
    for (std::size_t i = 0; i < logf.size(); ++i)
        logf[i] = std::log(std::max(src[i], p.epsilon));

    detail::Spectrum spec = detail::fft2(logf, w, h);
    for (int ky = 0; ky < h; ++ky) {
        const double fy = detail::signed_bin(ky, h);
        for (int kx = 0; kx < w; ++kx) {
            const double fx = detail::signed_bin(kx, w);
            spec[std::size_t(ky) * w + kx] *= homomorphic_gain(fx, fy, p);
        }
    }
    std::vector<double> back = detail::ifft2_real(spec, w, h);

    RasterImage out = RasterImage::gray(w, h);
    auto dst = out.plane(0);
    for (std::size_t i = 0; i < back.size(); ++i)
        dst[i] = std::exp(back[i]);
    return out;
}

}  // namespace uwr::enhance
