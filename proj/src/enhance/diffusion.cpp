#include "uwr/enhance.hpp"

#include <cmath>

namespace uwr::enhance {

using imgcore::ColorSpace;
using imgcore::ImageError;

RasterImage anisotropic_diffuse(const RasterImage& img, const DiffusionParams& p) {
    p.validate();
    if (img.colorspace() != ColorSpace::Gray)
        throw ImageError("anisotropic_diffuse: expected a gray image");
    const int w = img.width(), h = img.height();
    const double inv_k2 = 1.0 / (p.k_edge * p.k_edge);
    auto conductance = [inv_k2](double grad) { return std::exp(-grad * grad * inv_k2); };

    RasterImage cur = img;
    RasterImage next = img;
    for (int it = 0; it < p.iterations; ++it) {
        for (int y = 0; y < h; ++y) {
            const int yn = y > 0 ? y - 1 : y;
            const int ys = y + 1 < h ? y + 1 : y;
            for (int x = 0; x < w; ++x) {
                const int xw = x > 0 ? x - 1 : x;
                const int xe = x + 1 < w ? x + 1 : x;
                const double c = cur.at(x, y);
                // Replicated border: differences across the edge vanish.
                const double gn = cur.at(x, yn) - c;
                const double gs = cur.at(x, ys) - c;
                const double ge = cur.at(xe, y) - c;
                const double gw = cur.at(xw, y) - c;
                next.at(x, y) = c + p.lambda * (conductance(gn) * gn + conductance(gs) * gs +
                                                conductance(ge) * ge + conductance(gw) * gw);
            }
        }
        std::swap(cur, next);
    }
    return cur;
}

}  // namespace uwr::enhance
