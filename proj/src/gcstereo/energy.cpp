#include "uwr/gcstereo.hpp"

#include <algorithm>
#include <cmath>

namespace uwr::gcstereo {

void StereoEnergyParams::validate() const {
    if (disparity_max <= disparity_min) throw StereoError("disparity_max must exceed disparity_min");
    if (!(smoothness_weight >= 0.0) || !std::isfinite(smoothness_weight))
        throw StereoError("smoothness_weight must be >= 0");
    if (!(truncation > 0.0) || !std::isfinite(truncation)) throw StereoError("truncation must be > 0");
    if (smoothness_truncation < 1) throw StereoError("smoothness_truncation must be >= 1");
    if (max_sweeps < 1) throw StereoError("max_sweeps must be >= 1");
}

Smoothness smoothness_from_string(const std::string& s) {
    if (s == "truncated_linear") return Smoothness::TruncatedLinear;
    if (s == "potts") return Smoothness::Potts;
    throw StereoError("unknown smoothness form '" + s + "' (expected truncated_linear or potts)");
}

const char* to_string(Smoothness s) {
    return s == Smoothness::Potts ? "potts" : "truncated_linear";
}

namespace {

double sample(const RasterImage& img, int x, int y) {
    return img.at(std::clamp(x, 0, img.width() - 1), y);
}

// Distance from v to the interval spanned by the linearly interpolated
// half-pixel neighbourhood of img at x.
double interval_distance(double v, const RasterImage& img, int x, int y) {
    const double c = sample(img, x, y);
    const double lo_half = 0.5 * (c + sample(img, x - 1, y));
    const double hi_half = 0.5 * (c + sample(img, x + 1, y));
    const double mn = std::min({c, lo_half, hi_half});
    const double mx = std::max({c, lo_half, hi_half});
    return std::max({0.0, v - mx, mn - v});
}

}  // namespace

double data_term(const RasterImage& left, const RasterImage& right, int x, int y, int d,
                 double truncation, bool* border) {
    const int xr = x - d;
    const bool outside = xr < 0 || xr >= right.width();
    if (border) *border = outside;
    if (outside) return truncation;
    const double a = interval_distance(left.at(x, y), right, xr, y);
    const double b = interval_distance(right.at(xr, y), left, x, y);
    return std::min(truncation, std::min(a, b));
}

CostVolume build_cost_volume(const RasterImage& left, const RasterImage& right,
                             const StereoEnergyParams& p) {
    p.validate();
    if (left.channels() != 1 || right.channels() != 1)
        throw StereoError("build_cost_volume: expected single-channel images");
    if (left.width() != right.width() || left.height() != right.height())
        throw StereoError("build_cost_volume: image dimensions differ");
    if (!left.all_finite() || !right.all_finite())
        throw StereoError("build_cost_volume: non-finite samples");
    CostVolume cv;
    cv.width = left.width();
    cv.height = left.height();
    cv.disparity_min = p.disparity_min;
    cv.disparity_max = p.disparity_max;
    const std::size_t L = std::size_t(cv.labels());
    cv.cost.resize(cv.pixels() * L);
    cv.out_of_bounds.resize(cv.pixels() * L);
    for (int y = 0; y < cv.height; ++y)
        for (int x = 0; x < cv.width; ++x) {
            const std::size_t base = (std::size_t(y) * cv.width + x) * L;
            for (int d = p.disparity_min; d <= p.disparity_max; ++d) {
                bool border = false;
                const double v = data_term(left, right, x, y, d, p.truncation, &border);
                cv.cost[base + std::size_t(d - p.disparity_min)] = std::int32_t(std::lround(v * kEnergyScale));
                cv.out_of_bounds[base + std::size_t(d - p.disparity_min)] = border;
            }
        }
    return cv;
}

Capacity smoothness_cost(int a, int b, const StereoEnergyParams& p) {
    const Capacity unit = std::llround(p.smoothness_weight * kEnergyScale);
    if (p.smoothness == Smoothness::Potts) return a == b ? 0 : unit;
    return unit * std::min(std::abs(a - b), p.smoothness_truncation);
}

Capacity energy_of(const std::vector<int>& labels, const CostVolume& cv, const StereoEnergyParams& p) {
    if (labels.size() != cv.pixels()) throw StereoError("energy_of: label count does not match the cost volume");
    Capacity e = 0;
    for (int y = 0; y < cv.height; ++y)
        for (int x = 0; x < cv.width; ++x) {
            const std::size_t i = std::size_t(y) * cv.width + x;
            const int f = labels[i];
            if (f < cv.disparity_min || f > cv.disparity_max) throw StereoError("energy_of: label out of range");
            e += cv.at(i, f);
            if (x + 1 < cv.width) e += smoothness_cost(f, labels[i + 1], p);
            if (y + 1 < cv.height) e += smoothness_cost(f, labels[i + std::size_t(cv.width)], p);
        }
    return e;
}

Capacity energy_of(const DisparityMap& map, const CostVolume& cv, const StereoEnergyParams& p) {
    return energy_of(map.labels, cv, p);
}

double DisparityMap::valid_fraction() const {
    if (valid.empty()) return 0.0;
    return double(std::count(valid.begin(), valid.end(), std::uint8_t(1))) / double(valid.size());
}

}  // namespace uwr::gcstereo
