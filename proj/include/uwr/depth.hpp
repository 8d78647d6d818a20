#pragma once

#include "uwr/gcstereo.hpp"
#include "uwr/imgcore.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

// Disparity to metric depth, depth filtering, and a textured image-space
// Delaunay mesh.
namespace uwr::depth {

using imgcore::RasterImage;

class DepthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CameraRig {
    double focal_length = 0.0;  // pixels
    double baseline = 0.0;      // metres

    void validate() const;
};

struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> depth;  // metres; meaningful only where valid
    std::vector<std::uint8_t> valid;

    DepthMap() = default;
    DepthMap(int w, int h);

    double at(int x, int y) const { return depth[std::size_t(y) * width + x]; }
    double& at(int x, int y) { return depth[std::size_t(y) * width + x]; }
    bool is_valid(int x, int y) const { return valid[std::size_t(y) * width + x] != 0; }
    std::size_t valid_count() const;
};

// z = f B / d; d <= 0 is invalid.
double depth_from_disparity(double d, const CameraRig& rig);
double disparity_from_depth(double z, const CameraRig& rig);

DepthMap triangulate_depth(const gcstereo::DisparityMap& disp, const CameraRig& rig);

// Median over the valid pixels of an odd window. Invalid pixels with at least
// one valid neighbour are filled; the rest stay invalid.
DepthMap smooth_depth(const DepthMap& dm, int window);

// Pinhole back-projection with the principal point at the image centre.
Eigen::Vector3d backproject_pixel(double x, double y, double z, const CameraRig& rig, int width, int height);
std::vector<Eigen::Vector3d> backproject(const DepthMap& dm, const CameraRig& rig);

using Triangle = std::array<int, 3>;

// Delaunay triangulation (counter-clockwise triangles, indices into `points`)
// minus triangles with an edge longer than max_edge. Points must be distinct.
std::vector<Triangle> delaunay_mesh(const std::vector<Eigen::Vector2d>& points,
                                    double max_edge = std::numeric_limits<double>::infinity());

// Positive when d lies strictly inside the circumcircle of the
// counter-clockwise triangle (a, b, c). Evaluated in long double.
long double in_circle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                      const Eigen::Vector2d& d);

struct SurfaceMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<Eigen::Vector2d> uv;
    std::vector<Eigen::Vector2d> pixels;  // image-plane position of each vertex
    std::vector<Triangle> triangles;
    RasterImage texture;
    std::string texture_file;  // name recorded in the PLY header

    double area() const;
};

SurfaceMesh build_mesh(const DepthMap& dm, const RasterImage& texture, const CameraRig& rig,
                       int stride, double max_edge);

void write_ply(const SurfaceMesh& mesh, const std::filesystem::path& path);
SurfaceMesh read_ply(const std::filesystem::path& path);

// Float PFM; invalid pixels are NaN.
void save_depth_pfm(const DepthMap& dm, const std::filesystem::path& path);
DepthMap load_depth_pfm(const std::filesystem::path& path);

}  // namespace uwr::depth
