#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uwr::imgcore {

enum class ColorSpace { RGB, YCbCr, Gray };

const char* to_string(ColorSpace cs);

class ImageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Planar multi-channel image. Samples are nominally in [0,1] but may leave
// that range between filter stages. Channel c occupies
// data[c*width*height, (c+1)*width*height) in row-major order.
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, ColorSpace cs, double fill = 0.0);

    static RasterImage gray(int width, int height, double fill = 0.0) {
        return RasterImage(width, height, ColorSpace::Gray, fill);
    }
    static RasterImage rgb(int width, int height, double fill = 0.0) {
        return RasterImage(width, height, ColorSpace::RGB, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return colorspace_ == ColorSpace::Gray ? 1 : 3; }
    ColorSpace colorspace() const { return colorspace_; }
    bool empty() const { return data_.empty(); }
    std::size_t pixel_count() const { return std::size_t(width_) * std::size_t(height_); }

    // Relabels a 3-channel image (RGB <-> YCbCr) without touching samples.
    void set_colorspace(ColorSpace cs);

    double& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
    double at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

    std::span<double> plane(int c);
    std::span<const double> plane(int c) const;
    std::span<double> samples() { return data_; }
    std::span<const double> samples() const { return data_; }

    // Single-channel copy of channel c.
    RasterImage channel(int c) const;
    void set_channel(int c, const RasterImage& src);

    bool all_finite() const;
    bool same_shape(const RasterImage& o) const {
        return width_ == o.width_ && height_ == o.height_ && colorspace_ == o.colorspace_;
    }

    friend bool operator==(const RasterImage& a, const RasterImage& b) {
        return a.same_shape(b) && a.data_ == b.data_;
    }

private:
    std::size_t index(int x, int y, int c) const {
        return (std::size_t(c) * std::size_t(height_) + std::size_t(y)) * std::size_t(width_) +
               std::size_t(x);
    }

    int width_ = 0;
    int height_ = 0;
    ColorSpace colorspace_ = ColorSpace::Gray;
    std::vector<double> data_;
};

struct ExtensionRecord {
    int original_width = 0;
    int original_height = 0;
    int padded_size = 0;
};

// --- file I/O ---------------------------------------------------------------

// Reads PNG (8-bit gray/RGB, alpha dropped), binary PPM (P6) or PGM (P5).
RasterImage load_image(const std::filesystem::path& path);

// Writes by extension: .png, .ppm, .pgm (8 bit, clamped to [0,1]) or
// .pfm (32-bit float, little endian, lossless).
void save_image(const RasterImage& img, const std::filesystem::path& path);

RasterImage load_pfm(const std::filesystem::path& path);
void save_pfm(const RasterImage& img, const std::filesystem::path& path);

// 16-bit binary PGM (maxval 65535, big endian as netpbm requires).
void save_pgm16(std::span<const std::uint16_t> values, int width, int height,
                const std::filesystem::path& path);
std::vector<std::uint16_t> load_pgm16(const std::filesystem::path& path, int& width,
                                      int& height);

// --- color ------------------------------------------------------------------

// Full-range BT.601: Y in [0,1], Cb/Cr centred on 0.5.
RasterImage rgb_to_ycbcr(const RasterImage& img);
RasterImage ycbcr_to_rgb(const RasterImage& img);

// Luminance of an RGB image, or a copy of a gray one.
RasterImage to_gray(const RasterImage& img);

// --- geometry ---------------------------------------------------------------

int next_power_of_two(int n);

// Pads to a square whose side is the smallest power of two covering both
// dimensions. Padding mirrors the image about its last row/column with
// half-sample symmetry (x[w] = x[w-1], x[w+1] = x[w-2], ...), repeating
// periodically when the pad is wider than the image.
std::pair<RasterImage, ExtensionRecord> symmetric_extend(const RasterImage& img);
RasterImage crop_extension(const RasterImage& img, const ExtensionRecord& rec);

RasterImage crop(const RasterImage& img, int x0, int y0, int width, int height);
RasterImage clamp01(const RasterImage& img);

}  // namespace uwr::imgcore
