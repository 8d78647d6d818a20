#include "uwr/depth.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace uwr::depth {

double SurfaceMesh::area() const {
    double a = 0.0;
    for (const Triangle& t : triangles) {
        const Eigen::Vector3d& p = vertices[std::size_t(t[0])];
        a += 0.5 * (vertices[std::size_t(t[1])] - p).cross(vertices[std::size_t(t[2])] - p).norm();
    }
    return a;
}

SurfaceMesh build_mesh(const DepthMap& dm, const RasterImage& texture, const CameraRig& rig, int stride,
                       double max_edge) {
    rig.validate();
    if (stride < 1) throw DepthError("build_mesh: stride must be >= 1");
    if (texture.width() != dm.width || texture.height() != dm.height)
        throw DepthError("build_mesh: texture and depth map dimensions differ");
    SurfaceMesh mesh;
    for (int y = 0; y < dm.height; y += stride)
        for (int x = 0; x < dm.width; x += stride) {
            if (!dm.is_valid(x, y)) continue;
            mesh.vertices.push_back(backproject_pixel(x, y, dm.at(x, y), rig, dm.width, dm.height));
            mesh.pixels.emplace_back(x, y);
            mesh.uv.emplace_back(double(x) / dm.width, double(y) / dm.height);
        }
    if (mesh.pixels.size() < 3) throw DepthError("build_mesh: fewer than 3 valid sample points");
    mesh.triangles = delaunay_mesh(mesh.pixels, max_edge);
    mesh.texture = texture;
    return mesh;
}

void write_ply(const SurfaceMesh& mesh, const std::filesystem::path& path) {
    if (mesh.triangles.empty()) throw DepthError("write_ply: mesh has no triangles");
    if (mesh.uv.size() != mesh.vertices.size()) throw DepthError("write_ply: uv count does not match vertices");
    const int n = int(mesh.vertices.size());
    for (const Triangle& t : mesh.triangles)
        for (const int i : t)
            if (i < 0 || i >= n) throw DepthError("write_ply: triangle index out of range");

    std::ofstream f(path);
    if (!f) throw DepthError("cannot write " + path.string());
    f << "ply\nformat ascii 1.0\n";
    if (!mesh.texture_file.empty()) f << "comment TextureFile " << mesh.texture_file << '\n';
    f << "element vertex " << n << '\n'
      << "property double x\nproperty double y\nproperty double z\n"
      << "property double u\nproperty double v\n"
      << "element face " << mesh.triangles.size() << '\n'
      << "property list uchar int vertex_indices\n"
      << "end_header\n";
    char buf[160];
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& p = mesh.vertices[i];
        const auto& t = mesh.uv[i];
        std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g %.9g %.9g\n", p.x(), p.y(), p.z(), t.x(), t.y());
        f << buf;
    }
    for (const Triangle& t : mesh.triangles) f << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (!f) throw DepthError("write failed for " + path.string());
}

SurfaceMesh read_ply(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw DepthError("cannot read " + path.string());
    std::string line;
    if (!std::getline(f, line) || line != "ply") throw DepthError("read_ply: missing ply magic");
    SurfaceMesh mesh;
    long nv = -1, nf = -1;
    while (std::getline(f, line)) {
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        if (word == "end_header") break;
        if (word == "format") {
            std::string fmt;
            ss >> fmt;
            if (fmt != "ascii") throw DepthError("read_ply: only ASCII PLY is supported");
        } else if (word == "comment") {
            std::string key;
            ss >> key;
            if (key == "TextureFile") ss >> mesh.texture_file;
        } else if (word == "element") {
            std::string name;
            long count = -1;
            ss >> name >> count;
            if (name == "vertex") nv = count;
            if (name == "face") nf = count;
        }
    }
    if (nv < 0 || nf < 0) throw DepthError("read_ply: missing vertex or face element");
    for (long i = 0; i < nv; ++i) {
        double x, y, z, u, v;
        if (!(f >> x >> y >> z >> u >> v)) throw DepthError("read_ply: truncated vertex list");
        mesh.vertices.emplace_back(x, y, z);
        mesh.uv.emplace_back(u, v);
    }
    for (long i = 0; i < nf; ++i) {
        int k;
        Triangle t;
        if (!(f >> k >> t[0] >> t[1] >> t[2]) || k != 3) throw DepthError("read_ply: only triangle faces are supported");
        for (const int idx : t)
            if (idx < 0 || idx >= nv) throw DepthError("read_ply: face index out of range");
        mesh.triangles.push_back(t);
    }
    return mesh;
}

}  // namespace uwr::depth
