#include "support.hpp"

#include "uwr/gcstereo.hpp"

#include <doctest.h>

#include <filesystem>
#include <limits>

using namespace uwr;
using namespace uwr::gcstereo;

namespace {

Capacity brute_force_min_cut(const FlowGraph& g) {
    const int n = g.node_count();
    Capacity best = std::numeric_limits<Capacity>::max();
    std::vector<int> free_nodes;
    for (int v = 0; v < n; ++v)
        if (v != g.source() && v != g.sink()) free_nodes.push_back(v);
    for (std::uint32_t mask = 0; mask < (1u << free_nodes.size()); ++mask) {
        std::vector<bool> side(std::size_t(n), false);
        side[std::size_t(g.source())] = true;
        for (std::size_t k = 0; k < free_nodes.size(); ++k)
            if (mask & (1u << k)) side[std::size_t(free_nodes[k])] = true;
        best = std::min(best, cut_capacity(g, side));
    }
    return best;
}

FlowGraph random_graph(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nodes(2, 10), cap(0, 9);
    const int n = nodes(rng);
    FlowGraph g(n, 0, n - 1);
    std::uniform_int_distribution<int> pick(0, n - 1), arcs(0, 3 * n);
    const int m = arcs(rng);
    for (int k = 0; k < m; ++k) {
        const int a = pick(rng), b = pick(rng);
        if (a == b) continue;
        g.add_arc(a, b, cap(rng), k % 3 == 0 ? cap(rng) : 0);
    }
    return g;
}

CostVolume toy_volume(int w, int h, int labels, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> c(0, 20);
    CostVolume cv;
    cv.width = w;
    cv.height = h;
    cv.disparity_min = 0;
    cv.disparity_max = labels - 1;
    cv.cost.resize(std::size_t(w * h * labels));
    cv.out_of_bounds.assign(cv.cost.size(), 0);
    for (auto& v : cv.cost) v = c(rng);
    return cv;
}

// Texture addressed with a margin so shifted lookups stay in range.
struct Texture {
    RasterImage img;
    int margin;
    double operator()(int x, int y) const { return img.at(x + margin, y); }
};

Texture make_texture(int w, int h, std::uint64_t seed, int margin = 16) {
    return {uwr::testing::smooth_texture(w + 2 * margin, h, 2.0, 0.45, seed), margin};
}

// left(x, y) == right(x - shift, y)
std::pair<RasterImage, RasterImage> shifted_pair(int w, int h, int shift, std::uint64_t seed) {
    const auto t = make_texture(w, h, seed);
    RasterImage l = RasterImage::gray(w, h), r = RasterImage::gray(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            l.at(x, y) = t(x, y);
            r.at(x, y) = t(x + shift, y);
        }
    return {l, r};
}

// Background at disparity 3, a fronto-parallel foreground at disparity 8 on
// left-image columns x >= boundary.
std::pair<RasterImage, RasterImage> two_plane_pair(int w, int h, int boundary, std::uint64_t seed) {
    const auto bg = make_texture(w, h, seed), fg = make_texture(w, h, seed + 1);
    RasterImage l = RasterImage::gray(w, h), r = RasterImage::gray(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            l.at(x, y) = x >= boundary ? fg(x, y) : bg(x, y);
            r.at(x, y) = x + 8 >= boundary ? fg(x + 8, y) : bg(x + 3, y);
        }
    return {l, r};
}

double fraction_exact(const DisparityMap& m, int d, int x0 = 0, int x1 = -1) {
    if (x1 < 0) x1 = m.width;
    int valid = 0, good = 0;
    for (int y = 0; y < m.height; ++y)
        for (int x = x0; x < x1; ++x) {
            if (!m.is_valid(x, y)) continue;
            ++valid;
            good += m.at(x, y) == d;
        }
    return valid ? double(good) / valid : 0.0;
}

}  // namespace

TEST_CASE("max_flow small examples") {
    {
        FlowGraph g(3, 0, 2);
        g.add_arc(0, 1, 3);
        g.add_arc(1, 2, 2);
        const auto r = max_flow(g);
        CHECK(r.flow == 2);
        CHECK(r.source_side == std::vector<bool>{true, true, false});
        CHECK(cut_capacity(g, r.source_side) == 2);
    }
    {
        FlowGraph g(4, 0, 3);
        g.add_arc(0, 1, 3);
        g.add_arc(1, 3, 1);
        g.add_arc(0, 2, 2);
        g.add_arc(2, 3, 2);
        CHECK(max_flow(g).flow == 3);
    }
    {
        FlowGraph g(2, 0, 1);
        CHECK(max_flow(g).flow == 0);
    }
    CHECK_THROWS_AS(FlowGraph(3, 1, 1), StereoError);
    FlowGraph g(3, 0, 2);
    CHECK_THROWS_AS(g.add_arc(0, 1, -1), StereoError);
    CHECK_THROWS_AS(g.add_arc(0, 5, 1), StereoError);
}

TEST_CASE("max_flow equals the exhaustive minimum cut") {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 200; ++t) {
        const FlowGraph g = random_graph(rng);
        const auto r = max_flow(g);
        CHECK(r.flow == brute_force_min_cut(g));
        CHECK(r.source_side[std::size_t(g.source())]);
        CHECK_FALSE(r.source_side[std::size_t(g.sink())]);
        CHECK(cut_capacity(g, r.source_side) == r.flow);
    }
}

TEST_CASE("max_flow handles large capacities and long chains") {
    const int n = 20000;
    FlowGraph g(n, 0, n - 1);
    for (int v = 0; v + 1 < n; ++v) g.add_arc(v, v + 1, v == n / 2 ? 7 : kLargeCapacity);
    CHECK(max_flow(g).flow == 7);
}

TEST_CASE("data_term cases") {
    const auto [l, r] = shifted_pair(64, 16, 5, 3);
    StereoEnergyParams p;
    for (int y = 0; y < 16; ++y)
        for (int x = 5; x < 64; ++x) CHECK(data_term(l, r, x, y, 5, p.truncation) == 0.0);
    int positive = 0;
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 64; ++x) positive += data_term(l, r, x, y, 0, p.truncation) > 0.0;
    MESSAGE("textured pixels with positive cost at d=0: " << positive);
    CHECK(positive > 64 * 16 / 2);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 64; ++x) CHECK(data_term(l, l, x, y, 0, p.truncation) == 0.0);

    const RasterImage black = RasterImage::gray(8, 1, 0.0), white = RasterImage::gray(8, 1, 1.0);
    CHECK(data_term(black, white, 4, 0, 1, 0.2) == 0.2);
    CHECK(data_term(black, white, 4, 0, 1, 0.7) == 0.7);
    bool border = false;
    CHECK(data_term(black, black, 2, 0, 3, 0.2, &border) == 0.2);
    CHECK(border);
    CHECK(data_term(black, black, 2, 0, -6, 0.2, &border) == 0.2);
    CHECK(border);
    CHECK(data_term(black, black, 2, 0, 2, 0.2, &border) == 0.0);
    CHECK_FALSE(border);
}

TEST_CASE("data_term is insensitive to half-pixel sampling") {
    // right is left sampled half a pixel over a linear ramp
    RasterImage l = RasterImage::gray(16, 1), r = RasterImage::gray(16, 1);
    for (int x = 0; x < 16; ++x) {
        l.at(x, 0) = 0.05 * x;
        r.at(x, 0) = 0.05 * (x + 0.5);
    }
    for (int x = 1; x < 15; ++x) CHECK(data_term(l, r, x, 0, 0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("expansion_move with everything at alpha is the identity") {
    std::mt19937_64 rng(5);
    const CostVolume cv = toy_volume(4, 3, 3, rng);
    StereoEnergyParams p;
    p.disparity_min = 0;
    p.disparity_max = 2;
    DisparityMap m;
    m.width = 4;
    m.height = 3;
    m.labels.assign(12, 1);
    m.valid.assign(12, 1);
    m.energy = energy_of(m, cv, p);
    const auto out = expansion_move(m, 1, cv, p);
    CHECK(out.labels == m.labels);
    CHECK(out.energy == m.energy);
}

TEST_CASE("expansion_move on a 1x2 image matches enumeration") {
    CostVolume cv;
    cv.width = 2;
    cv.height = 1;
    cv.disparity_min = 0;
    cv.disparity_max = 1;
    // D_p(0), D_p(1) for p = 0, 1
    cv.cost = {5, 1, 0, 4};
    cv.out_of_bounds.assign(4, 0);
    StereoEnergyParams p;
    p.disparity_min = 0;
    p.disparity_max = 1;
    p.smoothness = Smoothness::Potts;
    for (const double lambda : {0.0, 0.001, 0.003, 0.01}) {
        p.smoothness_weight = lambda;
        Capacity best = std::numeric_limits<Capacity>::max();
        std::vector<int> arg;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const Capacity e = energy_of(std::vector<int>{a, b}, cv, p);
                if (e < best) best = e, arg = {a, b};
            }
        // From {0, 0} the 1-expansions are exactly the four labellings.
        DisparityMap m;
        m.width = 2;
        m.height = 1;
        m.labels = {0, 0};
        m.valid = {1, 1};
        m.energy = energy_of(m, cv, p);
        const auto out = expansion_move(m, 1, cv, p);
        CHECK(out.energy == best);
        CHECK(out.labels == arg);
    }
}

TEST_CASE("expansion_move equals the best of all expansions on toy instances") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 60; ++t) {
        const int w = 2, h = t % 2 ? 2 : 1, labels = 2 + t % 2;
        const CostVolume cv = toy_volume(w, h, labels, rng);
        StereoEnergyParams p;
        p.disparity_min = 0;
        p.disparity_max = labels - 1;
        p.smoothness_weight = std::uniform_real_distribution<double>(0.0, 0.012)(rng);
        p.smoothness = t % 3 == 0 ? Smoothness::Potts : Smoothness::TruncatedLinear;
        p.smoothness_truncation = 1 + t % 2;
        std::uniform_int_distribution<int> lab(0, labels - 1);
        DisparityMap m;
        m.width = w;
        m.height = h;
        for (int i = 0; i < w * h; ++i) m.labels.push_back(lab(rng));
        m.valid.assign(std::size_t(w * h), 1);
        m.energy = energy_of(m, cv, p);
        for (int alpha = 0; alpha < labels; ++alpha) {
            Capacity best = std::numeric_limits<Capacity>::max();
            for (int mask = 0; mask < (1 << (w * h)); ++mask) {
                auto f = m.labels;
                for (int i = 0; i < w * h; ++i)
                    if (mask & (1 << i)) f[std::size_t(i)] = alpha;
                best = std::min(best, energy_of(f, cv, p));
            }
            const auto out = expansion_move(m, alpha, cv, p);
            CHECK(out.energy == best);
            CHECK(energy_of(out, cv, p) == out.energy);
        }
    }
}

TEST_CASE("expansion moves never increase the energy") {
    std::mt19937_64 rng(91);
    for (int t = 0; t < 10; ++t) {
        const CostVolume cv = toy_volume(9, 7, 5, rng);
        StereoEnergyParams p;
        p.disparity_min = 0;
        p.disparity_max = 4;
        p.smoothness_weight = 0.004;
        DisparityMap m = winner_take_all(cv);
        m.energy = energy_of(m, cv, p);
        std::uniform_int_distribution<int> lab(0, 4);
        for (int k = 0; k < 25; ++k) {
            const auto next = expansion_move(m, lab(rng), cv, p);
            CHECK(next.energy <= m.energy);
            CHECK(energy_of(next, cv, p) == next.energy);
            m = next;
        }
    }
}

TEST_CASE("solve_disparity recovers a constant shift") {
    const auto [l, r] = shifted_pair(128, 128, 5, 1);
    StereoEnergyParams p;
    p.disparity_min = 0;
    p.disparity_max = 10;
    const auto m = solve_disparity(l, r, p);
    const double frac = fraction_exact(m, 5);
    MESSAGE("exact fraction " << frac << ", valid " << m.valid_fraction() << ", sweeps " << m.sweeps);
    CHECK(frac >= 0.95);
    CHECK(m.valid_fraction() > 0.9);
    // a valid label never points outside the right image
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x)
            if (m.is_valid(x, y)) CHECK(m.at(x, y) <= x);
}

TEST_CASE("shifted pairs give a constant interior disparity") {
    for (int shift = 1; shift <= 8; ++shift) {
        const auto [l, r] = shifted_pair(64, 40, shift, std::uint64_t(10 + shift));
        StereoEnergyParams p;
        p.disparity_min = 0;
        p.disparity_max = 10;
        const auto m = solve_disparity(l, r, p);
        int wrong = 0;
        for (int y = 0; y < 40; ++y)
            for (int x = 12; x < 64; ++x) wrong += m.at(x, y) != shift;
        CHECK(wrong == 0);
    }
}

TEST_CASE("zero smoothness reduces to winner take all") {
    const auto [l, r] = two_plane_pair(64, 32, 30, 4);
    StereoEnergyParams p;
    p.disparity_min = 0;
    p.disparity_max = 12;
    p.smoothness_weight = 0.0;
    const CostVolume cv = build_cost_volume(l, r, p);
    CHECK(solve_disparity(cv, p).labels == winner_take_all(cv).labels);
}

TEST_CASE("solve_disparity on two planes") {
    const int w = 128, h = 96, b = 64;
    const auto [l, r] = two_plane_pair(w, h, b, 8);
    for (const double lambda : {0.02, 0.03, 0.05}) {
        StereoEnergyParams p;
        p.disparity_min = 0;
        p.disparity_max = 12;
        p.smoothness_weight = lambda;
        const auto m = solve_disparity(l, r, p);
        int valid = 0, good = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (!m.is_valid(x, y)) continue;
                ++valid;
                good += m.at(x, y) == (x >= b ? 8 : 3);
            }
        // boundary per row: first valid column from which the foreground label persists;
        // the occluded strip left of the foreground is invalid and skipped
        int rows_ok = 0;
        for (int y = 0; y < h; ++y) {
            int edge = w;
            for (int x = w - 1; x >= 0 && (!m.is_valid(x, y) || m.at(x, y) >= 6); --x)
                if (m.is_valid(x, y)) edge = x;
            rows_ok += std::abs(edge - b) <= 2;
        }
        MESSAGE("lambda " << lambda << ": exact " << double(good) / valid << ", rows ok " << rows_ok);
        CHECK(double(good) / valid >= 0.9);
        CHECK(rows_ok == h);
    }
}

TEST_CASE("energy_of audits the solver") {
    const auto [l, r] = two_plane_pair(48, 32, 24, 9);
    StereoEnergyParams p;
    p.disparity_min = 0;
    p.disparity_max = 10;
    const CostVolume cv = build_cost_volume(l, r, p);
    const auto m = solve_disparity(cv, p);
    CHECK(energy_of(m, cv, p) == m.energy);

    // local minimum: one more sweep moves nothing
    for (int alpha = 0; alpha <= 10; ++alpha) CHECK(expansion_move(m, alpha, cv, p).labels == m.labels);

    // a single-pixel flip changes the energy by the local terms only
    auto f = m.labels;
    const int x = 20, y = 13, i = y * 48 + x;
    const int before = f[std::size_t(i)], after = (before + 4) % 11;
    f[std::size_t(i)] = after;
    Capacity delta = cv.at(std::size_t(i), after) - cv.at(std::size_t(i), before);
    for (const int j : {i - 1, i + 1, i - 48, i + 48})
        delta += smoothness_cost(after, m.labels[std::size_t(j)], p) -
                 smoothness_cost(before, m.labels[std::size_t(j)], p);
    CHECK(energy_of(f, cv, p) - m.energy == delta);

    const auto a = shifted_pair(32, 16, 0, 1).first;
    const CostVolume same = build_cost_volume(a, a, p);
    CHECK(energy_of(std::vector<int>(same.pixels(), 0), same, p) == 0);
}

TEST_CASE("solve_disparity is deterministic and validates input") {
    const auto [l, r] = two_plane_pair(48, 24, 20, 12);
    StereoEnergyParams p;
    p.disparity_min = 0;
    p.disparity_max = 10;
    p.seed = 42;
    const auto a = solve_disparity(l, r, p);
    const auto b = solve_disparity(l, r, p);
    CHECK(a.labels == b.labels);
    CHECK(a.valid == b.valid);
    CHECK(a.energy == b.energy);
    p.disparity_max = 0;
    CHECK_THROWS_AS(solve_disparity(l, r, p), StereoError);
    p.disparity_max = 10;
    p.smoothness_weight = -1.0;
    CHECK_THROWS_AS(solve_disparity(l, r, p), StereoError);
    p.smoothness_weight = 0.03;
    CHECK_THROWS_AS(solve_disparity(l, RasterImage::gray(40, 24), p), StereoError);
}

TEST_CASE("negative disparity ranges work") {
    // left(x) == right(x + 4): disparity -4
    const auto [r, l] = shifted_pair(64, 24, 4, 13);
    StereoEnergyParams p;
    p.disparity_min = -8;
    p.disparity_max = 2;
    const auto m = solve_disparity(l, r, p);
    CHECK(fraction_exact(m, -4) >= 0.95);
}

TEST_CASE("disparity files") {
    const auto [l, r] = shifted_pair(40, 20, 3, 14);
    StereoEnergyParams p;
    p.disparity_min = 0;
    p.disparity_max = 6;
    const auto m = solve_disparity(l, r, p);
    const auto dir = std::filesystem::temp_directory_path();
    save_disparity_pgm(m, p.disparity_min, dir / "uwr_disp.pgm");
    save_disparity_pfm(m, dir / "uwr_disp.pfm");
    save_disparity_json(m, p, dir / "uwr_disp.json");
    int w = 0, h = 0;
    const auto codes = imgcore::load_pgm16(dir / "uwr_disp.pgm", w, h);
    CHECK(w == 40);
    CHECK(h == 20);
    const auto back = load_disparity_pfm(dir / "uwr_disp.pfm");
    for (std::size_t i = 0; i < codes.size(); ++i) {
        CHECK(bool(codes[i]) == bool(m.valid[i]));
        if (m.valid[i]) {
            CHECK(codes[i] == m.labels[i] + 1);
            CHECK(back.labels[i] == m.labels[i]);
        }
        CHECK(back.valid[i] == m.valid[i]);
    }
    for (const char* f : {"uwr_disp.pgm", "uwr_disp.pfm", "uwr_disp.json"}) std::filesystem::remove(dir / f);
}
