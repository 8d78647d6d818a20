#include "uwr/pipeline.hpp"

#include <fstream>
#include <map>
#include <set>

namespace uwr::cli {

using nlohmann::json;

namespace {

// Calls v(block, key, field) for every configurable parameter.
template <class C, class V>
void visit_fields(C& c, V&& v) {
    auto& e = c.enhance;
    v("enhance", "moire_peak_ratio", e.moire.peak_ratio_threshold);
    v("enhance", "moire_notch_radius", e.moire.notch_radius);
    v("enhance", "moire_dc_guard", e.moire.dc_guard_radius);
    v("enhance", "r_high", e.homomorphic.r_high);
    v("enhance", "r_low", e.homomorphic.r_low);
    v("enhance", "cutoff_sigma", e.homomorphic.cutoff_sigma);
    v("enhance", "log_epsilon", e.homomorphic.epsilon);
    v("enhance", "wavelet_levels", e.wavelet.levels);
    v("enhance", "wavelet_half_width", e.wavelet.neighborhood_half_width);
    v("enhance", "diffusion_k", e.diffusion.k_edge);
    v("enhance", "diffusion_lambda", e.diffusion.lambda);
    v("enhance", "diffusion_iterations", e.diffusion.iterations);
    v("enhance", "low_clip", e.intensity.low_clip_fraction);
    v("enhance", "high_clip", e.intensity.high_clip_fraction);

    auto& t = c.tiepoints;
    v("tiepoints", "max_corners", t.corners.max_count);
    v("tiepoints", "min_spacing", t.corners.min_spacing);
    v("tiepoints", "harris_sigma", t.corners.sigma);
    v("tiepoints", "harris_k", t.corners.k);
    v("tiepoints", "relative_threshold", t.corners.relative_threshold);
    v("tiepoints", "min_corners", t.corners.min_count);
    v("tiepoints", "window", t.match.window);
    v("tiepoints", "search_radius", t.match.search_radius);
    v("tiepoints", "min_ncc", t.match.min_ncc);
    v("tiepoints", "symmetry_tolerance", t.match.symmetry_tolerance);
    v("tiepoints", "min_matches", t.match.min_matches);
    v("tiepoints", "ransac_threshold", t.consensus.threshold);
    v("tiepoints", "ransac_iterations", t.consensus.max_iterations);
    v("tiepoints", "ransac_confidence", t.consensus.confidence);

    auto& r = c.rectify.lm;
    v("rectify", "jacobian_step", r.jacobian_step);
    v("rectify", "initial_damping", r.initial_damping);
    v("rectify", "damping_factor", r.damping_factor);
    v("rectify", "relative_tolerance", r.relative_tolerance);
    v("rectify", "max_iterations", r.max_iterations);

    auto& g = c.gcstereo;
    v("gcstereo", "disparity_min", g.disparity_min);
    v("gcstereo", "disparity_max", g.disparity_max);
    v("gcstereo", "smoothness", g.smoothness);
    v("gcstereo", "smoothness_weight", g.smoothness_weight);
    v("gcstereo", "smoothness_truncation", g.smoothness_truncation);
    v("gcstereo", "truncation", g.truncation);
    v("gcstereo", "max_sweeps", g.max_sweeps);
    v("gcstereo", "left_right_check", g.left_right_check);

    v("depth", "smooth_window", c.depth.smooth_window);
    v("depth", "stride", c.depth.stride);
    v("depth", "max_edge", c.depth.max_edge);

    v("stages", "enhance", c.stages.enhance);
    v("stages", "tiepoints", c.stages.tiepoints);
    v("stages", "rectify", c.stages.rectify);
    v("stages", "gcstereo", c.stages.gcstereo);
    v("stages", "depth", c.stages.depth);
}

const std::set<std::string> kTopLevel{"input_left", "input_right", "output_dir", "truth_disparity", "seed", "rig"};

struct Reader {
    const json& j;
    std::map<std::string, std::set<std::string>> consumed;

    template <class T>
    void operator()(const char* block, const char* key, T& field) {
        consumed[block];
        if (!j.contains(block)) return;
        const json& b = j.at(block);
        if (!b.is_object()) throw ConfigError(std::string("config: '") + block + "' must be an object");
        if (!b.contains(key)) return;
        consumed[block].insert(key);
        try {
            if constexpr (std::is_same_v<T, gcstereo::Smoothness>)
                field = gcstereo::smoothness_from_string(b.at(key).get<std::string>());
            else if constexpr (std::is_same_v<T, bool>) {
                if (!b.at(key).is_boolean()) throw ConfigError("expected true or false");
                field = b.at(key).get<bool>();
            } else if constexpr (std::is_integral_v<T>) {
                if (!b.at(key).is_number_integer()) throw ConfigError("expected an integer");
                field = b.at(key).get<T>();
            } else {
                if (!b.at(key).is_number()) throw ConfigError("expected a number");
                field = b.at(key).get<T>();
            }
        } catch (const std::exception& ex) {
            throw ConfigError(std::string("config: ") + block + "." + key + ": " + ex.what());
        }
    }
};

struct Writer {
    json& j;

    template <class T>
    void operator()(const char* block, const char* key, const T& field) {
        if constexpr (std::is_same_v<T, gcstereo::Smoothness>)
            j[block][key] = gcstereo::to_string(field);
        else
            j[block][key] = field;
    }
};

std::string path_string(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    if (!j.at(key).is_string()) throw ConfigError(std::string("config: ") + key + " must be a string");
    return j.at(key).get<std::string>();
}

}  // namespace

void DepthStageParams::validate() const {
    if (smooth_window < 1 || smooth_window % 2 == 0) throw ConfigError("depth.smooth_window must be odd and >= 1");
    if (stride < 1) throw ConfigError("depth.stride must be >= 1");
    if (!(max_edge > 0.0)) throw ConfigError("depth.max_edge must be > 0");
}

void PipelineConfig::validate() const {
    if (input_left.empty() || input_right.empty()) throw ConfigError("config: input_left and input_right are required");
    if (output_dir.empty()) throw ConfigError("config: output_dir is required");
    try {
        enhance.moire.validate();
        enhance.homomorphic.validate();
        enhance.wavelet.validate();
        enhance.diffusion.validate();
        enhance.intensity.validate();
        gcstereo.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    depth.validate();
    if (tiepoints.match.window < 3 || tiepoints.match.window % 2 == 0)
        throw ConfigError("tiepoints.window must be odd and >= 3");
    if (tiepoints.match.search_radius < 1) throw ConfigError("tiepoints.search_radius must be >= 1");
    if (tiepoints.corners.max_count < tiepoints::kMinPairs) throw ConfigError("tiepoints.max_corners must be >= 8");
    if (!(tiepoints.consensus.threshold > 0.0)) throw ConfigError("tiepoints.ransac_threshold must be > 0");
    if (rectify.lm.max_iterations < 1) throw ConfigError("rectify.max_iterations must be >= 1");
    if (rig) {
        try {
            rig->validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: rig: ") + e.what());
        }
    }
    if (stages.depth && !rig) throw ConfigError("config: the depth stage needs rig.focal_length and rig.baseline");
}

PipelineConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    PipelineConfig c;
    Reader reader{j, {}};
    visit_fields(c, reader);
    for (const auto& [key, value] : j.items()) {
        if (kTopLevel.count(key)) continue;
        const auto it = reader.consumed.find(key);
        if (it == reader.consumed.end()) throw ConfigError("config: unknown block '" + key + "'");
        for (const auto& [k, _] : value.items())
            if (!it->second.count(k)) throw ConfigError("config: unknown key '" + key + "." + k + "'");
    }
    c.input_left = path_string(j, "input_left");
    c.input_right = path_string(j, "input_right");
    c.output_dir = path_string(j, "output_dir");
    c.truth_disparity = path_string(j, "truth_disparity");
    if (j.contains("seed")) {
        const json& sj = j.at("seed");
        if (!sj.is_number_integer() || (!sj.is_number_unsigned() && sj.get<std::int64_t>() < 0))
            throw ConfigError("config: seed must be a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("rig")) {
        const json& r = j.at("rig");
        if (!r.is_object()) throw ConfigError("config: rig must be an object");
        for (const auto& [k, _] : r.items())
            if (k != "focal_length" && k != "baseline") throw ConfigError("config: unknown key 'rig." + k + "'");
        if (!r.contains("focal_length") || !r.contains("baseline"))
            throw ConfigError("config: rig needs focal_length and baseline");
        if (!r.at("focal_length").is_number() || !r.at("baseline").is_number())
            throw ConfigError("config: rig values must be numbers");
        c.rig = depth::CameraRig{r.at("focal_length").get<double>(), r.at("baseline").get<double>()};
    }
    return c;
}

json config_to_json(const PipelineConfig& cfg) {
    json j;
    j["input_left"] = cfg.input_left.string();
    j["input_right"] = cfg.input_right.string();
    j["output_dir"] = cfg.output_dir.string();
    if (!cfg.truth_disparity.empty()) j["truth_disparity"] = cfg.truth_disparity.string();
    j["seed"] = cfg.seed;
    if (cfg.rig) j["rig"] = {{"focal_length", cfg.rig->focal_length}, {"baseline", cfg.rig->baseline}};
    Writer w{j};
    visit_fields(cfg, w);
    return j;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void apply_override(json& j, const std::string& dotted_key, const std::string& value) {
    json v;
    try {
        v = json::parse(value);
    } catch (const json::parse_error&) {
        v = value;
    }
    const auto dot = dotted_key.find('.');
    if (dot == std::string::npos) {
        j[dotted_key] = v;
        return;
    }
    const std::string block = dotted_key.substr(0, dot), key = dotted_key.substr(dot + 1);
    if (block.empty() || key.empty() || key.find('.') != std::string::npos)
        throw ConfigError("malformed override --" + dotted_key);
    if (j.contains(block) && !j.at(block).is_object()) throw ConfigError("config: '" + block + "' must be an object");
    j[block][key] = v;
}

}  // namespace uwr::cli
