#include "uwr/enhance.hpp"

#include <stdexcept>

namespace uwr::enhance {

void MoireParams::validate() const {
    if (!(peak_ratio_threshold > 1.0))
        throw std::invalid_argument("moire: peak_ratio_threshold must exceed 1");
    if (notch_radius < 1 || dc_guard_radius < 1)
        throw std::invalid_argument("moire: radii must be at least 1");
}

void HomomorphicParams::validate() const {
    if (!(r_low > 0.0) || !(r_high > r_low))
        throw std::invalid_argument("homomorphic: need r_high > r_low > 0");
    if (!(cutoff_sigma > 0.0))
        throw std::invalid_argument("homomorphic: cutoff_sigma must be positive");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("homomorphic: epsilon must be positive");
}

void WaveletDenoiseParams::validate() const {
    if (levels < 1)
        throw std::invalid_argument("wavelet: levels must be at least 1");
    if (neighborhood_half_width < 0)
        throw std::invalid_argument("wavelet: neighborhood_half_width must be non-negative");
}

void DiffusionParams::validate() const {
    if (!(k_edge > 0.0))
        throw std::invalid_argument("diffusion: k_edge must be positive");
    if (!(lambda > 0.0) || lambda > 0.25)
        throw std::invalid_argument("diffusion: lambda must lie in (0, 0.25]");
    if (iterations < 1)
        throw std::invalid_argument("diffusion: iterations must be at least 1");
}

void IntensityAdjustParams::validate() const {
    if (low_clip_fraction < 0.0 || high_clip_fraction < 0.0 ||
        !(low_clip_fraction + high_clip_fraction < 1.0))
        throw std::invalid_argument("intensity: clip fractions must be >= 0 and sum below 1");
}

}  // namespace uwr::enhance
