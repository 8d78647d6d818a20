#pragma once

#include "uwr/depth.hpp"
#include "uwr/enhance.hpp"
#include "uwr/gcstereo.hpp"
#include "uwr/rectify.hpp"
#include "uwr/tiepoints.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Configuration and sequential execution of the full reconstruction chain.
namespace uwr::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failure inside one stage; what() is prefixed with the stage name.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& cause)
        : std::runtime_error(stage + ": " + cause), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct StageFlags {
    bool enhance = true;
    bool tiepoints = true;
    bool rectify = true;
    bool gcstereo = true;
    bool depth = true;
};

struct TiePointParams {
    tiepoints::CornerOptions corners;
    tiepoints::MatchOptions match;
    tiepoints::ConsensusOptions consensus;
};

struct DepthStageParams {
    int smooth_window = 3;
    int stride = 2;
    double max_edge = 3.0;  // pixels, image plane

    void validate() const;
};

struct PipelineConfig {
    std::filesystem::path input_left;
    std::filesystem::path input_right;
    std::filesystem::path output_dir;
    std::filesystem::path truth_disparity;  // optional PFM, scored in the report
    std::uint64_t seed = 0;
    StageFlags stages;
    enhance::PreprocessParams enhance;
    TiePointParams tiepoints;
    rectify::EstimateOptions rectify;
    gcstereo::StereoEnergyParams gcstereo;
    DepthStageParams depth;
    std::optional<depth::CameraRig> rig;  // required by the depth stage

    void validate() const;
};

// Unknown blocks or keys are errors. Missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

// Sets j[block][key] (or j[key] for a top-level key) from a command-line
// value; the text is read as JSON when it parses, else as a string.
void apply_override(nlohmann::json& j, const std::string& dotted_key, const std::string& value);

// Runs the enabled stages in order and writes every intermediate plus
// report.json into cfg.output_dir. A disabled stage hands over its persisted
// output from an earlier run; a disabled enhance stage without one passes the
// inputs through. Returns the report.
nlohmann::json run_pipeline(const PipelineConfig& cfg);

// Report with the "timings" block removed, for determinism checks.
nlohmann::json report_without_timings(nlohmann::json report);

// File names of the intermediates inside output_dir.
namespace artifacts {
inline constexpr const char* kEnhancedLeft = "enhanced_left.pfm";
inline constexpr const char* kEnhancedRight = "enhanced_right.pfm";
inline constexpr const char* kTiePoints = "tiepoints.txt";
inline constexpr const char* kRectification = "rectification.json";
inline constexpr const char* kRectifiedLeft = "rectified_left.pfm";
inline constexpr const char* kRectifiedRight = "rectified_right.pfm";
inline constexpr const char* kDisparityPgm = "disparity.pgm";
inline constexpr const char* kDisparityPfm = "disparity.pfm";
inline constexpr const char* kDisparityJson = "disparity.json";
inline constexpr const char* kDepth = "depth.pfm";
inline constexpr const char* kMesh = "mesh.ply";
inline constexpr const char* kTexture = "texture.png";
inline constexpr const char* kReport = "report.json";
}  // namespace artifacts

}  // namespace uwr::cli
