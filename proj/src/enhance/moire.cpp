#include "uwr/enhance.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>

namespace uwr::enhance {

using imgcore::ColorSpace;
using imgcore::ImageError;

RasterImage remove_moire(const RasterImage& img, const MoireParams& p) {
    p.validate();
    if (img.colorspace() != ColorSpace::Gray)
        throw ImageError("remove_moire: expected a gray image");
    const int w = img.width(), h = img.height();
    std::vector<double> field(img.samples().begin(), img.samples().end());
    detail::Spectrum spec = detail::fft2(field, w, h);

    std::vector<double> mag(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i)
        mag[i] = std::abs(spec[i]);

    const int r = p.notch_radius;
    const double guard2 = double(p.dc_guard_radius) * p.dc_guard_radius;
    std::vector<double> window;
    window.reserve(std::size_t(2 * r + 1) * (2 * r + 1));
    std::vector<double> replacement(spec.size(), -1.0);
    bool any_peak = false;

    for (int ky = 0; ky < h; ++ky) {
        const int fy = detail::signed_bin(ky, h);
        for (int kx = 0; kx < w; ++kx) {
            const int fx = detail::signed_bin(kx, w);
            if (double(fx) * fx + double(fy) * fy <= guard2)
                continue;
            const std::size_t idx = std::size_t(ky) * w + kx;
            window.clear();
            for (int dy = -r; dy <= r; ++dy) {
                const int yy = ((ky + dy) % h + h) % h;
                for (int dx = -r; dx <= r; ++dx) {
                    const int xx = ((kx + dx) % w + w) % w;
                    window.push_back(mag[std::size_t(yy) * w + xx]);
                }
            }
            auto mid = window.begin() + std::ptrdiff_t(window.size() / 2);
            std::nth_element(window.begin(), mid, window.end());
            const double median = *mid;
            if (mag[idx] > p.peak_ratio_threshold * median) {
                any_peak = true;
                // The conjugate bin sees the mirrored window, so it gets the same median.
                const std::size_t conj = std::size_t((h - ky) % h) * w + std::size_t((w - kx) % w);
                replacement[idx] = median;
                replacement[conj] = median;
            }
        }
    }
    if (!any_peak)
        return img;

    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (replacement[i] < 0.0)
            continue;
        spec[i] = mag[i] > 0.0 ? spec[i] * (replacement[i] / mag[i]) : std::complex<double>{};
    }
    std::vector<double> back = detail::ifft2_real(spec, w, h);
    RasterImage out = RasterImage::gray(w, h);
    std::copy(back.begin(), back.end(), out.samples().begin());
    return out;
}

}  // namespace uwr::enhance
