#include "uwr/gcstereo.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace uwr::gcstereo {
namespace {

// Binary energy over keep (0) / take-alpha (1) variables, assembled as an
// s-t graph: a node ending on the sink side takes alpha.
class BinaryGraph {
public:
    explicit BinaryGraph(int n) : n_(n), g_(n + 2, n, n + 1), unary0_(std::size_t(n), 0), unary1_(std::size_t(n), 0) {}

    void add_unary(int p, Capacity e0, Capacity e1) {
        unary0_[std::size_t(p)] += e0;
        unary1_[std::size_t(p)] += e1;
    }

    // E(0,0)=A, E(0,1)=B, E(1,0)=C, E(1,1)=D
    void add_pairwise(int p, int q, Capacity A, Capacity B, Capacity C, Capacity D) {
        const Capacity w = B + C - A - D;
        if (w < 0) throw StereoError("expansion_move: non-submodular pairwise term");
        constant_ += A;
        add_unary(p, 0, C - A);
        add_unary(q, 0, D - C);
        if (w > 0) g_.add_arc(p, q, w);
    }

    // Returns per-node decisions (true = take alpha) and the minimum energy.
    std::pair<std::vector<bool>, Capacity> solve() {
        Capacity constant = constant_;
        for (int p = 0; p < n_; ++p) {
            Capacity e0 = unary0_[std::size_t(p)], e1 = unary1_[std::size_t(p)];
            const Capacity m = std::min(e0, e1);
            constant += m;
            e0 -= m;
            e1 -= m;
            if (e1 > 0) g_.add_arc(n_, p, e1);      // cut when p takes alpha
            if (e0 > 0) g_.add_arc(p, n_ + 1, e0);  // cut when p keeps its label
        }
        const auto r = max_flow(g_);
        std::vector<bool> choice(static_cast<std::size_t>(n_));
        for (int p = 0; p < n_; ++p) choice[std::size_t(p)] = !r.source_side[std::size_t(p)];
        return {choice, constant + r.flow};
    }

private:
    int n_;
    FlowGraph g_;
    std::vector<Capacity> unary0_, unary1_;
    Capacity constant_ = 0;
};

void mark_border(DisparityMap& m, const CostVolume& cv) {
    m.valid.assign(cv.pixels(), 1);
    for (std::size_t i = 0; i < cv.pixels(); ++i) m.valid[i] = !cv.border(i, m.labels[i]);
}

}  // namespace

DisparityMap expansion_move(const DisparityMap& current, int alpha, const CostVolume& cv,
                            const StereoEnergyParams& p) {
    if (alpha < cv.disparity_min || alpha > cv.disparity_max)
        throw StereoError("expansion_move: alpha outside the label range");
    if (current.labels.size() != cv.pixels()) throw StereoError("expansion_move: size mismatch");
    const int w = cv.width, h = cv.height;
    const auto& f = current.labels;
    BinaryGraph bg(w * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int i = y * w + x;
            bg.add_unary(i, cv.at(std::size_t(i), f[std::size_t(i)]), cv.at(std::size_t(i), alpha));
            auto pair = [&](int j) {
                const int a = f[std::size_t(i)], b = f[std::size_t(j)];
                bg.add_pairwise(i, j, smoothness_cost(a, b, p), smoothness_cost(a, alpha, p),
                                smoothness_cost(alpha, b, p), smoothness_cost(alpha, alpha, p));
            };
            if (x + 1 < w) pair(i + 1);
            if (y + 1 < h) pair(i + w);
        }
    auto [take, energy] = bg.solve();
    const Capacity before = energy_of(current, cv, p);
    if (energy >= before) {
        DisparityMap same = current;
        same.energy = before;
        return same;
    }
    DisparityMap out = current;
    for (std::size_t i = 0; i < take.size(); ++i)
        if (take[i]) out.labels[i] = alpha;
    out.energy = energy;
    mark_border(out, cv);
    return out;
}

DisparityMap winner_take_all(const CostVolume& cv) {
    DisparityMap m;
    m.width = cv.width;
    m.height = cv.height;
    m.labels.resize(cv.pixels());
    for (std::size_t i = 0; i < cv.pixels(); ++i) {
        int best = cv.disparity_min;
        for (int d = cv.disparity_min + 1; d <= cv.disparity_max; ++d)
            if (cv.at(i, d) < cv.at(i, best)) best = d;
        m.labels[i] = best;
    }
    mark_border(m, cv);
    return m;
}

DisparityMap solve_disparity(const CostVolume& cv, const StereoEnergyParams& p) {
    p.validate();
    if (cv.disparity_min != p.disparity_min || cv.disparity_max != p.disparity_max)
        throw StereoError("solve_disparity: cost volume and parameters disagree on the label range");
    DisparityMap m = winner_take_all(cv);
    m.energy = energy_of(m, cv, p);
    std::mt19937_64 rng(p.seed);
    std::vector<int> order(std::size_t(cv.labels()));
    std::iota(order.begin(), order.end(), cv.disparity_min);
    for (int sweep = 0; sweep < p.max_sweeps; ++sweep) {
        std::shuffle(order.begin(), order.end(), rng);
        int moves = 0;
        for (const int alpha : order) {
            DisparityMap next = expansion_move(m, alpha, cv, p);
            if (next.energy < m.energy) {
                ++moves;
                next.sweeps = m.sweeps;
                next.moves = m.moves;
                m = std::move(next);
            }
        }
        ++m.sweeps;
        m.moves += moves;
        if (moves == 0) break;
    }
    return m;
}

RasterImage flip_horizontal(const RasterImage& img) {
    RasterImage out(img.width(), img.height(), img.colorspace());
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) out.at(x, y, c) = img.at(img.width() - 1 - x, y, c);
    return out;
}

void left_right_check(DisparityMap& left_ref, const DisparityMap& right_ref, int tolerance) {
    if (left_ref.width != right_ref.width || left_ref.height != right_ref.height)
        throw StereoError("left_right_check: size mismatch");
    for (int y = 0; y < left_ref.height; ++y)
        for (int x = 0; x < left_ref.width; ++x) {
            const std::size_t i = std::size_t(y) * left_ref.width + x;
            const int d = left_ref.labels[i];
            const int xr = x - d;
            if (xr < 0 || xr >= left_ref.width) {
                left_ref.valid[i] = 0;
                continue;
            }
            if (std::abs(d - right_ref.at(xr, y)) > tolerance) left_ref.valid[i] = 0;
        }
}

DisparityMap solve_disparity(const RasterImage& left, const RasterImage& right,
                             const StereoEnergyParams& p) {
    const RasterImage gl = imgcore::to_gray(left), gr = imgcore::to_gray(right);
    DisparityMap m = solve_disparity(build_cost_volume(gl, gr, p), p);
    if (p.left_right_check) {
        // Mirroring both images turns the right view into a left reference
        // with the same disparity sign.
        const DisparityMap mirrored =
            solve_disparity(build_cost_volume(flip_horizontal(gr), flip_horizontal(gl), p), p);
        DisparityMap right_ref = mirrored;
        for (int y = 0; y < m.height; ++y)
            for (int x = 0; x < m.width; ++x)
                right_ref.labels[std::size_t(y) * m.width + x] = mirrored.at(m.width - 1 - x, y);
        left_right_check(m, right_ref);
    }
    return m;
}

}  // namespace uwr::gcstereo
