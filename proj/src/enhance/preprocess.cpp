#include "uwr/enhance.hpp"

#include <algorithm>

namespace uwr::enhance {

using imgcore::ColorSpace;
using imgcore::ImageError;

RasterImage preprocess(const RasterImage& img, const PreprocessParams& p) {
    if (img.colorspace() != ColorSpace::RGB)
        throw ImageError("preprocess: expected an RGB image");
    if (img.empty())
        throw ImageError("preprocess: empty image");

    // (1) moire, per colour channel
    RasterImage demoired = img;
    for (int c = 0; c < 3; ++c)
        demoired.set_channel(c, remove_moire(img.channel(c), p.moire));

    // (2) square power-of-two extension, (3) luminance/chrominance split
    auto [extended, rec] = imgcore::symmetric_extend(demoired);
    RasterImage ycc = imgcore::rgb_to_ycbcr(extended);

    // (4)-(7) on luminance only
    RasterImage luma = ycc.channel(0);
    luma = homomorphic_filter(luma, p.homomorphic);
    WaveletDenoiseParams wp = p.wavelet;
    int max_levels = 0;
    while ((1 << (max_levels + 1)) <= rec.padded_size)
        ++max_levels;
    wp.levels = std::min(wp.levels, max_levels);
    if (wp.levels >= 1)
        luma = wavelet_denoise(luma, wp);
    luma = anisotropic_diffuse(luma, p.diffusion);
    luma = adjust_intensity(luma, p.intensity);
    ycc.set_channel(0, luma);

    // (8) back to RGB and undo the extension, (9) balance channel means
    RasterImage rgb = imgcore::clamp01(imgcore::crop_extension(imgcore::ycbcr_to_rgb(ycc), rec));
    return equalize_color_means(rgb);
}

}  // namespace uwr::enhance
