#include "doctest.h"
#include "support.hpp"

#include "uwr/enhance.hpp"

using namespace uwr::enhance;
namespace t = uwr::testing;

namespace {

RasterImage tinted(const RasterImage& gray, double r, double g, double b) {
    RasterImage out = RasterImage::rgb(gray.width(), gray.height());
    const double gains[3] = {r, g, b};
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < gray.pixel_count(); ++i)
            out.plane(c)[i] = gray.samples()[i] * gains[c];
    return out;
}

double channel_mean(const RasterImage& img, int c) { return t::mean_of(img.plane(c)); }

}  // namespace

TEST_CASE("preprocess is near-inert on clean balanced images") {
    // Averaged over a fixed set of fractal stand-ins for natural photographs;
    // individual images land between roughly 0.07 and 0.13.
    double sum = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        RasterImage clean = tinted(t::fractal_texture(256, seed), 1.0, 1.0, 1.0);
        const double rms = t::rms_diff(preprocess(clean, {}), clean);
        MESSAGE("seed " << seed << " RMS change " << rms);
        sum += rms;
    }
    CHECK(sum / 3.0 < 0.1);
}

TEST_CASE("preprocess corrects a synthetic degraded frame") {
    const int n = 256;
    RasterImage tex = t::smooth_texture(n, n, 2.0, 0.35, 78);
    RasterImage noise = t::gaussian_noise(n, n, 0.02, 79);
    RasterImage degraded_gray = RasterImage::gray(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            degraded_gray.at(x, y) = tex.at(x, y) * (0.3 + 0.7 * x / double(n - 1)) + noise.at(x, y);
    RasterImage degraded = tinted(degraded_gray, 0.6, 0.85, 1.0);
    RasterImage out = preprocess(degraded, {});
    const double m0 = channel_mean(out, 0), m1 = channel_mean(out, 1), m2 = channel_mean(out, 2);
    MESSAGE("channel means " << m0 << " " << m1 << " " << m2);
    CHECK(std::abs(m0 - m1) <= 0.05);
    CHECK(std::abs(m1 - m2) <= 0.05);
    CHECK(std::abs(m0 - m2) <= 0.05);

    const double cutoff = PreprocessParams{}.homomorphic.cutoff_sigma;
    const double before = t::low_frequency_ratio(uwr::imgcore::to_gray(degraded), cutoff);
    const double after = t::low_frequency_ratio(uwr::imgcore::to_gray(out), cutoff);
    MESSAGE("low-frequency ratio " << before << " -> " << after);
    CHECK(after * 2.0 <= before);
}
