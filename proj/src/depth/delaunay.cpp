#include "uwr/depth.hpp"

#include <algorithm>
#include <cmath>

namespace uwr::depth {
namespace {

using Real = long double;

Real orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    return (Real(b.x()) - a.x()) * (Real(c.y()) - a.y()) - (Real(b.y()) - a.y()) * (Real(c.x()) - a.x());
}

// n[i] is the triangle across the edge opposite v[i], or -1.
struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n;
    bool alive;
};

class Triangulator {
public:
    explicit Triangulator(const std::vector<Eigen::Vector2d>& pts) : real_(int(pts.size())), pts_(pts) {
        Eigen::Vector2d lo = pts[0], hi = pts[0];
        for (const auto& p : pts) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        const Eigen::Vector2d c = 0.5 * (lo + hi);
        const double k = 1e5 * std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1.0});
        pts_.emplace_back(c.x() - k, c.y() - k);
        pts_.emplace_back(c.x() + k, c.y() - k);
        pts_.emplace_back(c.x(), c.y() + k);
        tris_.push_back({{real_, real_ + 1, real_ + 2}, {-1, -1, -1}, true});
        start_.assign(pts_.size(), -1);
        end_.assign(pts_.size(), -1);
    }

    void insert(int pi) {
        const Eigen::Vector2d& p = pts_[std::size_t(pi)];
        const int t0 = locate(p);
        for (const int v : tris_[std::size_t(t0)].v)
            if (pts_[std::size_t(v)] == p) throw DepthError("delaunay_mesh: duplicate point");

        ++stamp_;
        mark_.resize(tris_.size(), 0);
        cavity_.assign(1, t0);
        mark_[std::size_t(t0)] = stamp_;
        for (std::size_t k = 0; k < cavity_.size(); ++k) {
            const Tri& t = tris_[std::size_t(cavity_[k])];
            for (const int nb : t.n) {
                if (nb < 0 || mark_[std::size_t(nb)] == stamp_) continue;
                const Tri& u = tris_[std::size_t(nb)];
                if (in_circle(pts_[std::size_t(u.v[0])], pts_[std::size_t(u.v[1])], pts_[std::size_t(u.v[2])], p) > 0) {
                    mark_[std::size_t(nb)] = stamp_;
                    cavity_.push_back(nb);
                }
            }
        }

        created_.clear();
        for (const int ci : cavity_) {
            for (int i = 0; i < 3; ++i) {
                const Tri t = tris_[std::size_t(ci)];
                const int nb = t.n[std::size_t(i)];
                if (nb >= 0 && mark_[std::size_t(nb)] == stamp_) continue;
                const int a = t.v[std::size_t((i + 1) % 3)], b = t.v[std::size_t((i + 2) % 3)];
                const int id = int(tris_.size());
                tris_.push_back({{a, b, pi}, {-1, -1, nb}, true});
                if (nb >= 0)
                    for (int& back : tris_[std::size_t(nb)].n)
                        if (back == ci) back = id;
                start_[std::size_t(a)] = id;
                end_[std::size_t(b)] = id;
                created_.push_back(id);
            }
        }
        for (const int ci : cavity_) tris_[std::size_t(ci)].alive = false;
        for (const int id : created_) {
            Tri& t = tris_[std::size_t(id)];
            t.n[0] = start_[std::size_t(t.v[1])];
            t.n[1] = end_[std::size_t(t.v[0])];
        }
        last_ = created_.back();
    }

    std::vector<Triangle> result() const {
        std::vector<Triangle> out;
        for (const Tri& t : tris_) {
            if (!t.alive) continue;
            if (t.v[0] >= real_ || t.v[1] >= real_ || t.v[2] >= real_) continue;
            if (orient(pts_[std::size_t(t.v[0])], pts_[std::size_t(t.v[1])], pts_[std::size_t(t.v[2])]) <= 0) continue;
            out.push_back(t.v);
        }
        return out;
    }

private:
    int locate(const Eigen::Vector2d& p) const {
        int t = last_;
        int rot = 0;
        for (std::size_t steps = 0; steps <= tris_.size(); ++steps) {
            const Tri& tri = tris_[std::size_t(t)];
            int next = -1;
            for (int k = 0; k < 3; ++k) {
                const int i = (k + rot) % 3;
                const int a = tri.v[std::size_t((i + 1) % 3)], b = tri.v[std::size_t((i + 2) % 3)];
                if (orient(pts_[std::size_t(a)], pts_[std::size_t(b)], p) < 0) {
                    next = tri.n[std::size_t(i)];
                    break;
                }
            }
            if (next < 0) return t;
            t = next;
            rot = (rot + 1) % 3;
        }
        throw DepthError("delaunay_mesh: point location failed");
    }

    int real_;
    std::vector<Eigen::Vector2d> pts_;
    std::vector<Tri> tris_;
    std::vector<int> start_, end_, cavity_, created_, mark_;
    int stamp_ = 0;
    int last_ = 0;
};

}  // namespace

long double in_circle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                      const Eigen::Vector2d& d) {
    const Real adx = Real(a.x()) - d.x(), ady = Real(a.y()) - d.y();
    const Real bdx = Real(b.x()) - d.x(), bdy = Real(b.y()) - d.y();
    const Real cdx = Real(c.x()) - d.x(), cdy = Real(c.y()) - d.y();
    const Real al = adx * adx + ady * ady;
    const Real bl = bdx * bdx + bdy * bdy;
    const Real cl = cdx * cdx + cdy * cdy;
    return al * (bdx * cdy - cdx * bdy) + bl * (cdx * ady - adx * cdy) + cl * (adx * bdy - bdx * ady);
}

std::vector<Triangle> delaunay_mesh(const std::vector<Eigen::Vector2d>& points, double max_edge) {
    if (points.size() < 3) throw DepthError("delaunay_mesh: need at least 3 points");
    for (const auto& p : points)
        if (!p.allFinite()) throw DepthError("delaunay_mesh: non-finite point");
    if (!(max_edge > 0.0)) throw DepthError("delaunay_mesh: max_edge must be > 0");

    std::size_t far = 1;
    while (far < points.size() && points[far] == points[0]) ++far;
    bool collinear = true;
    if (far < points.size())
        for (const auto& p : points)
            if (orient(points[0], points[far], p) != 0) {
                collinear = false;
                break;
            }
    if (collinear) throw DepthError("delaunay_mesh: points are collinear");

    Triangulator tr(points);
    for (int i = 0; i < int(points.size()); ++i) tr.insert(i);

    std::vector<Triangle> out;
    for (const Triangle& t : tr.result()) {
        bool keep = true;
        for (int i = 0; i < 3 && keep; ++i)
            keep = (points[std::size_t(t[std::size_t(i)])] - points[std::size_t(t[std::size_t((i + 1) % 3)])]).norm() <= max_edge;
        if (keep) out.push_back(t);
    }
    return out;
}

}  // namespace uwr::depth
