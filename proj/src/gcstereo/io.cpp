#include "uwr/gcstereo.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>

namespace uwr::gcstereo {

void save_disparity_pgm(const DisparityMap& map, int disparity_min, const std::filesystem::path& path) {
    std::vector<std::uint16_t> v(map.labels.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const int code = map.labels[i] - disparity_min + 1;
        if (code < 1 || code > 65535) throw StereoError("save_disparity_pgm: label does not fit 16 bits");
        v[i] = map.valid[i] ? std::uint16_t(code) : 0;
    }
    imgcore::save_pgm16(v, map.width, map.height, path);
}

void save_disparity_pfm(const DisparityMap& map, const std::filesystem::path& path) {
    RasterImage img = RasterImage::gray(map.width, map.height);
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x)
            img.at(x, y) = map.is_valid(x, y) ? double(map.at(x, y)) : std::numeric_limits<double>::quiet_NaN();
    imgcore::save_pfm(img, path);
}

DisparityMap load_disparity_pfm(const std::filesystem::path& path) {
    const RasterImage img = imgcore::load_pfm(path);
    if (img.channels() != 1) throw StereoError("load_disparity_pfm: expected a single-channel PFM");
    DisparityMap m;
    m.width = img.width();
    m.height = img.height();
    m.labels.resize(img.pixel_count(), 0);
    m.valid.resize(img.pixel_count(), 0);
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        const double v = img.samples()[i];
        if (std::isfinite(v)) {
            m.labels[i] = int(std::lround(v));
            m.valid[i] = 1;
        }
    }
    return m;
}

void save_disparity_json(const DisparityMap& map, const StereoEnergyParams& p,
                         const std::filesystem::path& path) {
    nlohmann::json j;
    j["width"] = map.width;
    j["height"] = map.height;
    j["disparity_min"] = p.disparity_min;
    j["disparity_max"] = p.disparity_max;
    j["pgm_encoding"] = "disparity - disparity_min + 1, 0 = invalid";
    j["energy"] = map.energy_value();
    j["energy_scaled"] = map.energy;
    j["energy_scale"] = kEnergyScale;
    j["sweeps"] = map.sweeps;
    j["moves"] = map.moves;
    j["valid_fraction"] = map.valid_fraction();
    j["smoothness"] = to_string(p.smoothness);
    j["smoothness_weight"] = p.smoothness_weight;
    j["smoothness_truncation"] = p.smoothness_truncation;
    j["truncation"] = p.truncation;
    j["seed"] = p.seed;
    j["left_right_check"] = p.left_right_check;
    std::ofstream f(path);
    if (!f) throw StereoError("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

}  // namespace uwr::gcstereo
