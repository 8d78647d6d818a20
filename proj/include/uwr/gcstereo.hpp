#pragma once

#include "uwr/imgcore.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

// Dense disparity on a rectified pair by alpha-expansion graph cuts.
//
// Convention: the left image is the reference and a pixel (x, y) with
// disparity d corresponds to (x - d, y) in the right image.
namespace uwr::gcstereo {

using imgcore::RasterImage;

class StereoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Capacity = std::int64_t;

// Stand-in for an infinite capacity; large enough to never saturate, small
// enough that sums of a few million of them do not overflow.
inline constexpr Capacity kLargeCapacity = Capacity(1) << 40;

// Energies are scaled by this factor and rounded before graph construction.
inline constexpr double kEnergyScale = 1000.0;

class FlowGraph {
public:
    struct Arc {
        int from;
        int to;
        Capacity capacity;
        Capacity reverse_capacity;
    };

    FlowGraph(int node_count, int source, int sink);

    int node_count() const { return node_count_; }
    int source() const { return source_; }
    int sink() const { return sink_; }
    const std::vector<Arc>& arcs() const { return arcs_; }

    // Adds the arc from->to together with its paired reverse arc.
    void add_arc(int from, int to, Capacity capacity, Capacity reverse_capacity = 0);

private:
    int node_count_;
    int source_;
    int sink_;
    std::vector<Arc> arcs_;
};

struct MaxFlowResult {
    Capacity flow = 0;
    std::vector<bool> source_side;  // min cut: nodes reachable from the source in the residual graph
};

// Dinic's blocking-flow algorithm. Exact for integer capacities.
MaxFlowResult max_flow(const FlowGraph& g);

// Sum of capacities of arcs leaving `source_side`.
Capacity cut_capacity(const FlowGraph& g, const std::vector<bool>& source_side);

enum class Smoothness { TruncatedLinear, Potts };

struct StereoEnergyParams {
    int disparity_min = 0;
    int disparity_max = 16;
    double smoothness_weight = 0.03;  // per unit label difference, gray levels
    double truncation = 0.2;          // data-term cap, gray levels
    Smoothness smoothness = Smoothness::TruncatedLinear;
    int smoothness_truncation = 2;    // label differences beyond this cost no more
    std::uint64_t seed = 0;           // sweep order
    int max_sweeps = 20;
    bool left_right_check = true;

    void validate() const;
    int label_count() const { return disparity_max - disparity_min + 1; }
};

Smoothness smoothness_from_string(const std::string& s);
const char* to_string(Smoothness s);

// Scaled integer data costs for every pixel and label. Entries whose right
// coordinate leaves the image hold the truncation cost and are flagged.
struct CostVolume {
    int width = 0;
    int height = 0;
    int disparity_min = 0;
    int disparity_max = 0;
    std::vector<std::int32_t> cost;         // [pixel * labels + label index]
    std::vector<std::uint8_t> out_of_bounds;

    int labels() const { return disparity_max - disparity_min + 1; }
    std::size_t pixels() const { return std::size_t(width) * std::size_t(height); }
    std::int32_t at(std::size_t pixel, int disparity) const {
        return cost[pixel * std::size_t(labels()) + std::size_t(disparity - disparity_min)];
    }
    bool border(std::size_t pixel, int disparity) const {
        return out_of_bounds[pixel * std::size_t(labels()) + std::size_t(disparity - disparity_min)] != 0;
    }
};

// Sampling-insensitive absolute difference between left(x, y) and
// right(x - d, y), capped at `truncation`. Sets *border when x - d leaves the
// right image (the value is then `truncation`).
double data_term(const RasterImage& left, const RasterImage& right, int x, int y, int d,
                 double truncation, bool* border = nullptr);

CostVolume build_cost_volume(const RasterImage& left, const RasterImage& right,
                             const StereoEnergyParams& p);

struct DisparityMap {
    int width = 0;
    int height = 0;
    std::vector<int> labels;
    std::vector<std::uint8_t> valid;
    Capacity energy = 0;  // scaled by kEnergyScale
    int sweeps = 0;
    int moves = 0;

    int at(int x, int y) const { return labels[std::size_t(y) * width + x]; }
    bool is_valid(int x, int y) const { return valid[std::size_t(y) * width + x] != 0; }
    double valid_fraction() const;
    double energy_value() const { return double(energy) / kEnergyScale; }
};

// Scaled smoothness penalty between two neighbouring labels.
Capacity smoothness_cost(int a, int b, const StereoEnergyParams& p);

// Total energy: data terms plus smoothness over the 4-neighbourhood.
Capacity energy_of(const std::vector<int>& labels, const CostVolume& cv, const StereoEnergyParams& p);
Capacity energy_of(const DisparityMap& map, const CostVolume& cv, const StereoEnergyParams& p);

// Best labelling among all alpha-expansions of `current`. Returns `current`
// unchanged unless the energy strictly decreases.
DisparityMap expansion_move(const DisparityMap& current, int alpha, const CostVolume& cv,
                            const StereoEnergyParams& p);

// Per-pixel argmin of the data term (ties to the smallest disparity).
DisparityMap winner_take_all(const CostVolume& cv);

// Expansion sweeps from the winner-take-all start until a sweep makes no move.
// No left-right check; `valid` only excludes out-of-image matches.
DisparityMap solve_disparity(const CostVolume& cv, const StereoEnergyParams& p);

// Full solve with the optional left-right consistency pass.
DisparityMap solve_disparity(const RasterImage& left, const RasterImage& right,
                             const StereoEnergyParams& p);

RasterImage flip_horizontal(const RasterImage& img);

// Invalidates pixels whose left-reference disparity disagrees by more than
// `tolerance` with the right-reference disparity of their match.
void left_right_check(DisparityMap& left_ref, const DisparityMap& right_ref, int tolerance = 1);

// 16-bit PGM with label - disparity_min + 1 (0 = invalid).
void save_disparity_pgm(const DisparityMap& map, int disparity_min, const std::filesystem::path& path);
// Float PFM; invalid pixels are NaN.
void save_disparity_pfm(const DisparityMap& map, const std::filesystem::path& path);
DisparityMap load_disparity_pfm(const std::filesystem::path& path);
void save_disparity_json(const DisparityMap& map, const StereoEnergyParams& p,
                         const std::filesystem::path& path);

}  // namespace uwr::gcstereo
