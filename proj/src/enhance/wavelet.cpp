#include "uwr/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uwr::enhance {

using imgcore::ColorSpace;
using imgcore::ImageError;

namespace {

constexpr double kOrthoTolerance = 1e-12;

double even_shift_product(const std::vector<double>& a, const std::vector<double>& b, int shift) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const long j = long(k) + shift;
        if (j >= 0 && j < long(b.size()))
            s += a[k] * b[std::size_t(j)];
    }
    return s;
}

// One analysis step along a strided line of length n (n even):
//   low[i]  = sum_k h0[k] x[(2i + k) mod n]
//   high[i] = sum_k h1[k] x[(2i + k) mod n]
void analyze_line(const double* in, std::size_t stride, int n, const FilterBank& bank,
                  double* low, double* high, std::size_t out_stride) {
    const auto& h0 = bank.lowpass();
    const auto& h1 = bank.highpass();
    for (int i = 0; i < n / 2; ++i) {
        double lo = 0.0, hi = 0.0;
        for (std::size_t k = 0; k < h0.size(); ++k) {
            const double v = in[std::size_t((2 * i + int(k)) % n) * stride];
            lo += h0[k] * v;
            hi += h1[k] * v;
        }
        low[std::size_t(i) * out_stride] = lo;
        high[std::size_t(i) * out_stride] = hi;
    }
}

// Adjoint of analyze_line; the exact inverse for an orthonormal bank.
void synthesize_line(const double* low, const double* high, std::size_t in_stride, int n,
                     const FilterBank& bank, double* out, std::size_t stride) {
    const auto& h0 = bank.lowpass();
    const auto& h1 = bank.highpass();
    for (int m = 0; m < n; ++m)
        out[std::size_t(m) * stride] = 0.0;
    for (int i = 0; i < n / 2; ++i) {
        const double lo = low[std::size_t(i) * in_stride];
        const double hi = high[std::size_t(i) * in_stride];
        for (std::size_t k = 0; k < h0.size(); ++k)
            out[std::size_t((2 * i + int(k)) % n) * stride] += h0[k] * lo + h1[k] * hi;
    }
}

// Single-level 2D analysis of an n x n block: rows, then columns.
void analyze_2d(const std::vector<double>& in, int n, const FilterBank& bank, RasterImage& ll,
                DetailBands& d) {
    const int half = n / 2;
    std::vector<double> rows(std::size_t(n) * n);
    for (int y = 0; y < n; ++y)
        analyze_line(&in[std::size_t(y) * n], 1, n, bank, &rows[std::size_t(y) * n],
                     &rows[std::size_t(y) * n + half], 1);
    std::vector<double> out(std::size_t(n) * n);
    for (int x = 0; x < n; ++x)
        analyze_line(&rows[std::size_t(x)], std::size_t(n), n, bank, &out[std::size_t(x)],
                     &out[std::size_t(half) * n + x], std::size_t(n));
    ll = RasterImage::gray(half, half);
    d.lh = RasterImage::gray(half, half);
    d.hl = RasterImage::gray(half, half);
    d.hh = RasterImage::gray(half, half);
    for (int y = 0; y < half; ++y)
        for (int x = 0; x < half; ++x) {
            ll.at(x, y) = out[std::size_t(y) * n + x];
            d.hl.at(x, y) = out[std::size_t(y) * n + x + half];
            d.lh.at(x, y) = out[std::size_t(y + half) * n + x];
            d.hh.at(x, y) = out[std::size_t(y + half) * n + x + half];
        }
}

std::vector<double> synthesize_2d(const RasterImage& ll, const DetailBands& d,
                                  const FilterBank& bank) {
    const int half = ll.width();
    const int n = 2 * half;
    std::vector<double> in(std::size_t(n) * n);
    for (int y = 0; y < half; ++y)
        for (int x = 0; x < half; ++x) {
            in[std::size_t(y) * n + x] = ll.at(x, y);
            in[std::size_t(y) * n + x + half] = d.hl.at(x, y);
            in[std::size_t(y + half) * n + x] = d.lh.at(x, y);
            in[std::size_t(y + half) * n + x + half] = d.hh.at(x, y);
        }
    std::vector<double> cols(std::size_t(n) * n);
    for (int x = 0; x < n; ++x)
        synthesize_line(&in[std::size_t(x)], &in[std::size_t(half) * n + x], std::size_t(n), n,
                        bank, &cols[std::size_t(x)], std::size_t(n));
    std::vector<double> out(std::size_t(n) * n);
    for (int y = 0; y < n; ++y)
        synthesize_line(&cols[std::size_t(y) * n], &cols[std::size_t(y) * n + half], 1, n, bank,
                        &out[std::size_t(y) * n], 1);
    return out;
}

double median_abs(std::span<const double> v) {
    std::vector<double> a(v.size());
    std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
    const std::size_t n = a.size();
    auto mid = a.begin() + std::ptrdiff_t(n / 2);
    std::nth_element(a.begin(), mid, a.end());
    if (n % 2 == 1)
        return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(a.begin(), mid);
    return 0.5 * (lower + upper);
}

// Mean of squares over a (2r+1)^2 window clipped to the band.
std::vector<double> local_mean_square(const RasterImage& band, int r) {
    const int w = band.width(), h = band.height();
    std::vector<double> sat(std::size_t(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            const double v = band.at(x, y);
            row += v * v;
            sat[std::size_t(y + 1) * (w + 1) + x + 1] = sat[std::size_t(y) * (w + 1) + x + 1] + row;
        }
    }
    std::vector<double> out(std::size_t(w) * h);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - r), y1 = std::min(h, y + r + 1);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - r), x1 = std::min(w, x + r + 1);
            const double s = sat[std::size_t(y1) * (w + 1) + x1] - sat[std::size_t(y0) * (w + 1) + x1] -
                             sat[std::size_t(y1) * (w + 1) + x0] + sat[std::size_t(y0) * (w + 1) + x0];
            out[std::size_t(y) * w + x] = std::max(0.0, s) / double((y1 - y0) * (x1 - x0));
        }
    }
    return out;
}

// child <- (sqrt(c^2 + p^2) - sqrt(3) sigma_n^2 / sigma)_+ / sqrt(c^2 + p^2) * child
void shrink_band(RasterImage& child, const RasterImage* parent, double sigma_n, int half_width) {
    const std::vector<double> ms = local_mean_square(child, half_width);
    const double noise_var = sigma_n * sigma_n;
    const double sqrt3 = std::sqrt(3.0);
    for (int y = 0; y < child.height(); ++y)
        for (int x = 0; x < child.width(); ++x) {
            double& c = child.at(x, y);
            const double sigma =
                std::sqrt(std::max(ms[std::size_t(y) * child.width() + x] - noise_var, 0.0));
            const double par = parent ? parent->at(x / 2, y / 2) : 0.0;
            const double mag = std::sqrt(c * c + par * par);
            if (sigma <= 0.0 || mag <= 0.0) {
                c = 0.0;
                continue;
            }
            const double gain = std::max(mag - sqrt3 * noise_var / sigma, 0.0) / mag;
            c *= gain;
        }
}

}  // namespace

FilterBank::FilterBank(std::string name, std::vector<double> lowpass, std::vector<double> highpass)
    : name_(std::move(name)), lowpass_(std::move(lowpass)), highpass_(std::move(highpass)) {
    if (lowpass_.empty() || lowpass_.size() != highpass_.size() || lowpass_.size() % 2 != 0)
        throw std::invalid_argument("filter bank '" + name_ + "': taps must be non-empty, even, equal length");
    const int len = int(lowpass_.size());
    for (int s = -len; s <= len; s += 2) {
        const double want = s == 0 ? 1.0 : 0.0;
        if (std::abs(even_shift_product(lowpass_, lowpass_, s) - want) > kOrthoTolerance ||
            std::abs(even_shift_product(highpass_, highpass_, s) - want) > kOrthoTolerance ||
            std::abs(even_shift_product(lowpass_, highpass_, s)) > kOrthoTolerance)
            throw std::invalid_argument("filter bank '" + name_ +
                                        "' is not orthonormal (perfect reconstruction fails)");
    }
}

FilterBank FilterBank::farras() {
    constexpr double a = 0.08838834764831845;  // 1/(8 sqrt 2)
    constexpr double b = 0.69587998903399600;
    constexpr double c = 0.01122679215254100;
    return FilterBank("farras", {0.0, -a, a, b, b, a, -a, c, c, 0.0},
                      {0.0, -c, c, a, a, -b, b, -a, -a, 0.0});
}

WaveletPyramid dwt2(const RasterImage& img, int levels, const FilterBank& bank) {
    if (img.colorspace() != ColorSpace::Gray)
        throw ImageError("dwt2: expected a gray image");
    if (img.width() != img.height())
        throw ImageError("dwt2: expected a square image");
    if (levels < 1)
        throw ImageError("dwt2: levels must be at least 1");
    const int n = img.width();
    if (n == 0 || n % (1 << levels) != 0)
        throw ImageError("dwt2: side " + std::to_string(n) + " is not divisible by 2^" +
                         std::to_string(levels));
    WaveletPyramid pyr;
    std::vector<double> cur(img.samples().begin(), img.samples().end());
    int side = n;
    for (int l = 0; l < levels; ++l) {
        RasterImage ll;
        DetailBands d;
        analyze_2d(cur, side, bank, ll, d);
        pyr.details.push_back(std::move(d));
        side /= 2;
        cur.assign(ll.samples().begin(), ll.samples().end());
        pyr.lowpass = std::move(ll);
    }
    return pyr;
}

RasterImage idwt2(const WaveletPyramid& pyr, const FilterBank& bank) {
    if (pyr.details.empty())
        throw ImageError("idwt2: empty pyramid");
    RasterImage cur = pyr.lowpass;
    for (auto it = pyr.details.rbegin(); it != pyr.details.rend(); ++it) {
        if (it->hh.width() != cur.width())
            throw ImageError("idwt2: inconsistent subband sizes");
        std::vector<double> up = synthesize_2d(cur, *it, bank);
        RasterImage next = RasterImage::gray(2 * cur.width(), 2 * cur.height());
        std::copy(up.begin(), up.end(), next.samples().begin());
        cur = std::move(next);
    }
    return cur;
}

double estimate_noise_sigma(const WaveletPyramid& pyr) {
    if (pyr.details.empty())
        throw ImageError("estimate_noise_sigma: empty pyramid");
    return median_abs(pyr.details.front().hh.samples()) / 0.6745;
}

RasterImage wavelet_denoise(const RasterImage& img, const WaveletDenoiseParams& p) {
    p.validate();
    WaveletPyramid pyr = dwt2(img, p.levels, p.filter_bank);
    const double sigma_n = estimate_noise_sigma(pyr);
    const int levels = int(pyr.details.size());
    // Finest first: parents are read before being shrunk themselves.
    for (int l = 0; l < levels; ++l) {
        DetailBands& d = pyr.details[std::size_t(l)];
        const DetailBands* parent = l + 1 < levels ? &pyr.details[std::size_t(l) + 1] : nullptr;
        shrink_band(d.lh, parent ? &parent->lh : nullptr, sigma_n, p.neighborhood_half_width);
        shrink_band(d.hl, parent ? &parent->hl : nullptr, sigma_n, p.neighborhood_half_width);
        shrink_band(d.hh, parent ? &parent->hh : nullptr, sigma_n, p.neighborhood_half_width);
    }
    return idwt2(pyr, p.filter_bank);
}

}  // namespace uwr::enhance
