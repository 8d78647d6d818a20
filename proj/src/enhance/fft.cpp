#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <memory>
#include <stdexcept>

namespace uwr::enhance::detail {

namespace {

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer alloc(std::size_t n) {
    auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!p)
        throw std::bad_alloc();
    return FftwBuffer(p);
}

// FFTW_ESTIMATE keeps plans (and therefore results) independent of timing.
void run(fftw_complex* buf, int width, int height, int sign) {
    fftw_plan plan = fftw_plan_dft_2d(height, width, buf, buf, sign, FFTW_ESTIMATE);
    if (!plan)
        throw std::runtime_error("fftw plan creation failed");
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

}  // namespace

Spectrum fft2(const std::vector<double>& field, int width, int height) {
    const std::size_t n = std::size_t(width) * std::size_t(height);
    auto buf = alloc(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf[i][0] = field[i];
        buf[i][1] = 0.0;
    }
    run(buf.get(), width, height, FFTW_FORWARD);
    Spectrum out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = {buf[i][0], buf[i][1]};
    return out;
}

std::vector<double> ifft2_real(const Spectrum& spectrum, int width, int height) {
    const std::size_t n = std::size_t(width) * std::size_t(height);
    auto buf = alloc(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf[i][0] = spectrum[i].real();
        buf[i][1] = spectrum[i].imag();
    }
    run(buf.get(), width, height, FFTW_BACKWARD);
    std::vector<double> out(n);
    const double scale = 1.0 / double(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = buf[i][0] * scale;
    return out;
}

}  // namespace uwr::enhance::detail
