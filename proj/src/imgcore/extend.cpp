#include "uwr/imgcore.hpp"

#include <algorithm>

namespace uwr::imgcore {

namespace {

// Half-sample symmetric index into [0, n).
int reflect(int i, int n) {
    const int period = 2 * n;
    int m = i % period;
    if (m < 0)
        m += period;
    return m < n ? m : period - 1 - m;
}

}  // namespace

int next_power_of_two(int n) {
    int p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

std::pair<RasterImage, ExtensionRecord> symmetric_extend(const RasterImage& img) {
    if (img.width() < 1 || img.height() < 1)
        throw ImageError("symmetric_extend: empty image");
    ExtensionRecord rec{img.width(), img.height(),
                        next_power_of_two(std::max(img.width(), img.height()))};
    const int side = rec.padded_size;
    RasterImage out(side, side, img.colorspace());
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < side; ++y) {
            const int sy = reflect(y, img.height());
            for (int x = 0; x < side; ++x)
                out.at(x, y, c) = img.at(reflect(x, img.width()), sy, c);
        }
    return {std::move(out), rec};
}

RasterImage crop_extension(const RasterImage& img, const ExtensionRecord& rec) {
    if (img.width() != rec.padded_size || img.height() != rec.padded_size)
        throw ImageError("crop_extension: image is not the recorded padded size");
    return crop(img, 0, 0, rec.original_width, rec.original_height);
}

}  // namespace uwr::imgcore
