#pragma once

#include "uwr/imgcore.hpp"

#include <string>
#include <vector>

// Underwater frame preprocessing: moire suppression, homomorphic illumination
// correction, wavelet denoising, edge-preserving diffusion, contrast stretch
// and colour-mean balancing.
namespace uwr::enhance {

using imgcore::RasterImage;

struct MoireParams {
    double peak_ratio_threshold = 10.0;  // peak magnitude / local median magnitude
    int notch_radius = 2;                // median window half width, in frequency bins
    int dc_guard_radius = 8;             // bins within this radius of DC are never touched

    void validate() const;
};

// High-emphasis transfer function
//   H(w) = (r_high - r_low) * (1 - exp(-|w|^2 / (2 cutoff_sigma^2))) + r_low
// applied to the spectrum of the log image.
struct HomomorphicParams {
    double r_high = 2.5;
    double r_low = 0.5;
    double cutoff_sigma = 32.0;  // frequency bins
    double epsilon = 1e-4;       // floor applied before the logarithm

    void validate() const;
};

// Orthogonal two-channel filter bank. Construction from taps verifies
// orthonormality of the even shifts, which is what perfect reconstruction
// of the periodic transform rests on.
class FilterBank {
public:
    FilterBank(std::string name, std::vector<double> lowpass, std::vector<double> highpass);

    // Farras nearly-symmetric orthogonal bank (10 taps, two of them zero).
    static FilterBank farras();

    const std::string& name() const { return name_; }
    const std::vector<double>& lowpass() const { return lowpass_; }
    const std::vector<double>& highpass() const { return highpass_; }

private:
    std::string name_;
    std::vector<double> lowpass_;
    std::vector<double> highpass_;
};

struct WaveletDenoiseParams {
    int levels = 3;
    int neighborhood_half_width = 3;  // 7x7 window for the local signal variance
    FilterBank filter_bank = FilterBank::farras();

    void validate() const;
};

struct DiffusionParams {
    double k_edge = 0.1;
    double lambda = 0.2;
    int iterations = 5;

    void validate() const;
};

struct IntensityAdjustParams {
    double low_clip_fraction = 0.01;
    double high_clip_fraction = 0.01;

    void validate() const;
};

struct PreprocessParams {
    MoireParams moire;
    HomomorphicParams homomorphic;
    WaveletDenoiseParams wavelet;
    DiffusionParams diffusion;
    IntensityAdjustParams intensity;
};

// One decomposition level. lh: lowpass along rows, highpass along columns;
// hl: the converse; hh: highpass both ways.
struct DetailBands {
    RasterImage lh;
    RasterImage hl;
    RasterImage hh;
};

struct WaveletPyramid {
    std::vector<DetailBands> details;  // details[0] is the finest scale
    RasterImage lowpass;               // coarsest approximation
};

// Returns the input unchanged when no spectral peak passes the threshold.
RasterImage remove_moire(const RasterImage& img, const MoireParams& p);

// H evaluated at a centred frequency (bins from DC).
double homomorphic_gain(double wx, double wy, const HomomorphicParams& p);
RasterImage homomorphic_filter(const RasterImage& img, const HomomorphicParams& p);

// Periodic separable DWT. Side lengths must be divisible by 2^levels.
WaveletPyramid dwt2(const RasterImage& img, int levels, const FilterBank& bank);
RasterImage idwt2(const WaveletPyramid& pyr, const FilterBank& bank);

// Robust noise deviation: median(|HH at the finest scale|) / 0.6745.
double estimate_noise_sigma(const WaveletPyramid& pyr);

// Bivariate (child/parent) shrinkage of every detail coefficient.
RasterImage wavelet_denoise(const RasterImage& img, const WaveletDenoiseParams& p);

RasterImage anisotropic_diffuse(const RasterImage& img, const DiffusionParams& p);

RasterImage adjust_intensity(const RasterImage& img, const IntensityAdjustParams& p);

RasterImage equalize_color_means(const RasterImage& img);

// Full chain on an RGB frame; output has the input's dimensions.
RasterImage preprocess(const RasterImage& img, const PreprocessParams& p);

}  // namespace uwr::enhance
