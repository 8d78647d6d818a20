#pragma once

#include "uwr/imgcore.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

// Sparse left/right correspondences: Harris corners, NCC window matching with
// a mutual-best check, and RANSAC rejection against an epipolar model.
namespace uwr::tiepoints {

using imgcore::RasterImage;

class TiePointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Minimum number of correspondences the rectifier can work with.
inline constexpr int kMinPairs = 8;

struct TiePoint {
    Eigen::Vector2d left;
    Eigen::Vector2d right;
    bool inlier = true;
    double score = 1.0;  // match confidence in [0,1]
};

struct TiePointSet {
    std::vector<TiePoint> pairs;

    std::size_t inlier_count() const;
    std::vector<TiePoint> inliers() const;
};

struct Corner {
    Eigen::Vector2d position;  // sub-pixel, pixel-centre coordinates
    double response = 0.0;
};

struct CornerOptions {
    int max_count = 400;
    double min_spacing = 8.0;
    double sigma = 1.5;               // Gaussian integration scale of the structure tensor
    double k = 0.04;                  // Harris trace weight
    double relative_threshold = 1e-3; // fraction of the strongest response
    int min_count = kMinPairs;        // fewer corners than this is an error
};

struct MatchOptions {
    int window = 11;
    int search_radius = 64;
    double min_ncc = 0.8;
    double symmetry_tolerance = 1.0;  // pixels, for the right-to-left recheck
    int min_matches = kMinPairs;
};

struct ConsensusOptions {
    double threshold = 1.0;  // Sampson distance, pixels
    int max_iterations = 2000;
    double confidence = 0.99;
    std::uint64_t seed = 0;
};

// Harris corners sorted by decreasing response, at least min_spacing apart.
std::vector<Corner> detect_corners(const RasterImage& gray, const CornerOptions& opt = {});
std::vector<Corner> detect_corners(const RasterImage& gray, int max_count, double min_spacing);

// Pairs sorted by left-corner raster order (y, then x).
TiePointSet match_corners(const RasterImage& left, const RasterImage& right,
                          const std::vector<Corner>& corners, const MatchOptions& opt = {});

// Normalised 8-point estimate (rank 2 enforced) with m_r^T F m_l = 0.
Eigen::Matrix3d fundamental_8point(const std::vector<TiePoint>& pairs);

// Flags pairs whose Sampson distance to the consensus fundamental matrix
// exceeds the threshold. Never adds or removes pairs.
TiePointSet reject_outliers(const TiePointSet& pts, const ConsensusOptions& opt = {});

// Text format, one pair per line: "xl yl xr yr inlier score".
void write_tiepoints(const TiePointSet& pts, const std::filesystem::path& path);
TiePointSet read_tiepoints(const std::filesystem::path& path);

}  // namespace uwr::tiepoints
