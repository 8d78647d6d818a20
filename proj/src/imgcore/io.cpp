#include "uwr/imgcore.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace uwr::imgcore {

namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return char(std::tolower(ch)); });
    return ext;
}

std::uint8_t to_byte(double v) {
    return std::uint8_t(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string netpbm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty())
                return tok;
            continue;
        }
        tok.push_back(char(ch));
    }
    return tok;
}

int header_int(std::istream& in, const fs::path& path) {
    const std::string tok = netpbm_token(in);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size())
            throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ImageError("malformed netpbm header in " + path.string());
    }
}

RasterImage load_png(const fs::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw ImageError("cannot read PNG " + path.string() + ": " + image.message);
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int w = int(image.width), h = int(image.height);
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw ImageError("cannot decode PNG " + path.string() + ": " + msg);
    }
    if (w == 0 || h == 0)
        throw ImageError("zero-dimension image " + path.string());
    const int ch = color ? 3 : 1;
    RasterImage out(w, h, color ? ColorSpace::RGB : ColorSpace::Gray);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c)
                out.at(x, y, c) = buf[(std::size_t(y) * w + x) * ch + c] / 255.0;
    return out;
}

void save_png(const RasterImage& img, const fs::path& path) {
    const int ch = img.channels();
    if (img.colorspace() == ColorSpace::YCbCr)
        throw ImageError("save_png: convert YCbCr to RGB before writing");
    std::vector<std::uint8_t> buf(img.pixel_count() * std::size_t(ch));
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < ch; ++c)
                buf[(std::size_t(y) * img.width() + x) * ch + c] = to_byte(img.at(x, y, c));
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = png_uint_32(img.width());
    image.height = png_uint_32(img.height());
    image.format = ch == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr))
        throw ImageError("cannot write PNG " + path.string() + ": " + image.message);
}

RasterImage load_netpbm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ImageError("cannot open " + path.string());
    const std::string magic = netpbm_token(in);
    if (magic != "P5" && magic != "P6")
        throw ImageError("unsupported netpbm variant '" + magic + "' in " + path.string());
    const int w = header_int(in, path);
    const int h = header_int(in, path);
    const int maxval = header_int(in, path);
    if (w <= 0 || h <= 0)
        throw ImageError("zero-dimension image " + path.string());
    if (maxval <= 0 || maxval > 255)
        throw ImageError("only 8-bit netpbm images are supported: " + path.string());
    const bool color = magic == "P6";
    const int ch = color ? 3 : 1;
    std::vector<std::uint8_t> buf(std::size_t(w) * h * ch);
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (in.gcount() != std::streamsize(buf.size()))
        throw ImageError("truncated pixel data in " + path.string());
    RasterImage out(w, h, color ? ColorSpace::RGB : ColorSpace::Gray);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c)
                out.at(x, y, c) = buf[(std::size_t(y) * w + x) * ch + c] / double(maxval);
    return out;
}

void save_netpbm(const RasterImage& img, const fs::path& path, bool color) {
    if (color != (img.channels() == 3))
        throw ImageError("channel count does not match " + path.extension().string());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ImageError("cannot write " + path.string());
    out << (color ? "P6" : "P5") << '\n' << img.width() << ' ' << img.height() << "\n255\n";
    const int ch = img.channels();
    std::vector<std::uint8_t> buf(img.pixel_count() * std::size_t(ch));
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < ch; ++c)
                buf[(std::size_t(y) * img.width() + x) * ch + c] = to_byte(img.at(x, y, c));
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out)
        throw ImageError("write failed for " + path.string());
}

}  // namespace

RasterImage load_image(const fs::path& path) {
    if (!fs::exists(path))
        throw ImageError("no such file: " + path.string());
    const std::string ext = lower_extension(path);
    if (ext == ".png")
        return load_png(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm")
        return load_netpbm(path);
    if (ext == ".pfm")
        return load_pfm(path);
    throw ImageError("unsupported image format: " + path.string());
}

void save_image(const RasterImage& img, const fs::path& path) {
    if (img.empty())
        throw ImageError("refusing to write an empty image");
    const std::string ext = lower_extension(path);
    if (ext == ".png")
        save_png(img, path);
    else if (ext == ".ppm")
        save_netpbm(img, path, true);
    else if (ext == ".pgm")
        save_netpbm(img, path, false);
    else if (ext == ".pfm")
        save_pfm(img, path);
    else
        throw ImageError("unsupported output format: " + path.string());
}

// PFM stores rows bottom-to-top; a negative scale marks little-endian floats.
void save_pfm(const RasterImage& img, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ImageError("cannot write " + path.string());
    const int ch = img.channels();
    out << (ch == 3 ? "PF" : "Pf") << '\n' << img.width() << ' ' << img.height() << "\n-1.0\n";
    std::vector<float> row(std::size_t(img.width()) * ch);
    for (int y = img.height() - 1; y >= 0; --y) {
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < ch; ++c)
                row[std::size_t(x) * ch + c] = float(img.at(x, y, c));
        if constexpr (std::endian::native == std::endian::big)
            for (float& f : row)
                f = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(f)));
        out.write(reinterpret_cast<const char*>(row.data()),
                  std::streamsize(row.size() * sizeof(float)));
    }
    if (!out)
        throw ImageError("write failed for " + path.string());
}

RasterImage load_pfm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ImageError("cannot open " + path.string());
    const std::string magic = netpbm_token(in);
    if (magic != "PF" && magic != "Pf")
        throw ImageError("not a PFM file: " + path.string());
    const int w = header_int(in, path);
    const int h = header_int(in, path);
    double scale = 0.0;
    try {
        scale = std::stod(netpbm_token(in));
    } catch (const std::exception&) {
        throw ImageError("malformed PFM scale in " + path.string());
    }
    if (w <= 0 || h <= 0 || scale == 0.0)
        throw ImageError("malformed PFM header in " + path.string());
    const bool little = scale < 0.0;
    const bool swap = little != (std::endian::native == std::endian::little);
    const int ch = magic == "PF" ? 3 : 1;
    RasterImage img(w, h, ch == 3 ? ColorSpace::RGB : ColorSpace::Gray);
    std::vector<float> row(std::size_t(w) * ch);
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
        if (!in)
            throw ImageError("truncated PFM data in " + path.string());
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) {
                float f = row[std::size_t(x) * ch + c];
                if (swap)
                    f = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(f)));
                img.at(x, y, c) = f;
            }
    }
    return img;
}

void save_pgm16(std::span<const std::uint16_t> values, int width, int height,
                const fs::path& path) {
    if (values.size() != std::size_t(width) * std::size_t(height))
        throw ImageError("save_pgm16: value count does not match dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ImageError("cannot write " + path.string());
    out << "P5\n" << width << ' ' << height << "\n65535\n";
    std::vector<std::uint8_t> buf(values.size() * 2);
    for (std::size_t i = 0; i < values.size(); ++i) {
        buf[2 * i] = std::uint8_t(values[i] >> 8);
        buf[2 * i + 1] = std::uint8_t(values[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out)
        throw ImageError("write failed for " + path.string());
}

std::vector<std::uint16_t> load_pgm16(const fs::path& path, int& width, int& height) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ImageError("cannot open " + path.string());
    if (netpbm_token(in) != "P5")
        throw ImageError("not a binary PGM: " + path.string());
    width = header_int(in, path);
    height = header_int(in, path);
    const int maxval = header_int(in, path);
    if (width <= 0 || height <= 0 || maxval <= 255 || maxval > 65535)
        throw ImageError("not a 16-bit PGM: " + path.string());
    std::vector<std::uint8_t> buf(std::size_t(width) * height * 2);
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (in.gcount() != std::streamsize(buf.size()))
        throw ImageError("truncated pixel data in " + path.string());
    std::vector<std::uint16_t> values(std::size_t(width) * height);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = std::uint16_t((buf[2 * i] << 8) | buf[2 * i + 1]);
    return values;
}

}  // namespace uwr::imgcore
