#include "uwr/gcstereo.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace uwr::gcstereo {

FlowGraph::FlowGraph(int node_count, int source, int sink)
    : node_count_(node_count), source_(source), sink_(sink) {
    if (node_count < 2 || source < 0 || sink < 0 || source >= node_count || sink >= node_count ||
        source == sink)
        throw StereoError("FlowGraph: invalid terminals");
}

void FlowGraph::add_arc(int from, int to, Capacity capacity, Capacity reverse_capacity) {
    if (from < 0 || to < 0 || from >= node_count_ || to >= node_count_)
        throw StereoError("FlowGraph: node index out of range");
    if (capacity < 0 || reverse_capacity < 0 || capacity > kLargeCapacity ||
        reverse_capacity > kLargeCapacity)
        throw StereoError("FlowGraph: capacity outside [0, LARGE]");
    if (from == to) return;
    arcs_.push_back({from, to, capacity, reverse_capacity});
}

namespace {

// Residual network in compressed adjacency form. Arc a and a^1 are a pair.
class Residual {
public:
    explicit Residual(const FlowGraph& g) : n_(g.node_count()), s_(g.source()), t_(g.sink()) {
        const auto& arcs = g.arcs();
        std::vector<int> degree(std::size_t(n_) + 1, 0);
        for (const auto& a : arcs) {
            ++degree[std::size_t(a.from) + 1];
            ++degree[std::size_t(a.to) + 1];
        }
        for (int i = 0; i < n_; ++i) degree[std::size_t(i) + 1] += degree[std::size_t(i)];
        first_ = degree;
        head_.resize(arcs.size() * 2);
        cap_.resize(arcs.size() * 2);
        mate_.resize(arcs.size() * 2);
        std::vector<int> fill(first_.begin(), first_.end() - 1);
        for (const auto& a : arcs) {
            const int i = fill[std::size_t(a.from)]++, j = fill[std::size_t(a.to)]++;
            head_[std::size_t(i)] = a.to;
            cap_[std::size_t(i)] = a.capacity;
            mate_[std::size_t(i)] = j;
            head_[std::size_t(j)] = a.from;
            cap_[std::size_t(j)] = a.reverse_capacity;
            mate_[std::size_t(j)] = i;
        }
    }

    Capacity run() {
        Capacity total = 0;
        level_.assign(std::size_t(n_), -1);
        next_.assign(std::size_t(n_), 0);
        while (bfs()) {
            for (int v = 0; v < n_; ++v) next_[std::size_t(v)] = first_[std::size_t(v)];
            total += blocking_flow();
        }
        return total;
    }

    std::vector<bool> source_side() const {
        std::vector<bool> seen(std::size_t(n_), false);
        std::vector<int> stack{s_};
        seen[std::size_t(s_)] = true;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int a = first_[std::size_t(u)]; a < first_[std::size_t(u) + 1]; ++a) {
                const int v = head_[std::size_t(a)];
                if (cap_[std::size_t(a)] > 0 && !seen[std::size_t(v)]) {
                    seen[std::size_t(v)] = true;
                    stack.push_back(v);
                }
            }
        }
        return seen;
    }

private:
    bool bfs() {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[std::size_t(s_)] = 0;
        q.push(s_);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int a = first_[std::size_t(u)]; a < first_[std::size_t(u) + 1]; ++a) {
                const int v = head_[std::size_t(a)];
                if (cap_[std::size_t(a)] > 0 && level_[std::size_t(v)] < 0) {
                    level_[std::size_t(v)] = level_[std::size_t(u)] + 1;
                    q.push(v);
                }
            }
        }
        return level_[std::size_t(t_)] >= 0;
    }

    // Iterative depth-first augmentation along the level graph.
    Capacity blocking_flow() {
        Capacity total = 0;
        std::vector<int> path;  // arc indices from the source
        int u = s_;
        for (;;) {
            if (u == t_) {
                Capacity b = std::numeric_limits<Capacity>::max();
                for (const int a : path) b = std::min(b, cap_[std::size_t(a)]);
                std::size_t cut = path.size();
                for (std::size_t k = 0; k < path.size(); ++k) {
                    const int a = path[k];
                    cap_[std::size_t(a)] -= b;
                    cap_[std::size_t(mate_[std::size_t(a)])] += b;
                    if (cap_[std::size_t(a)] == 0 && cut == path.size()) cut = k;
                }
                total += b;
                path.resize(cut);
                u = path.empty() ? s_ : head_[std::size_t(path.back())];
                continue;
            }
            bool advanced = false;
            for (int& a = next_[std::size_t(u)]; a < first_[std::size_t(u) + 1]; ++a) {
                const int v = head_[std::size_t(a)];
                if (cap_[std::size_t(a)] > 0 && level_[std::size_t(v)] == level_[std::size_t(u)] + 1) {
                    path.push_back(a);
                    u = v;
                    advanced = true;
                    break;
                }
            }
            if (advanced) continue;
            level_[std::size_t(u)] = -1;  // dead end for this phase
            if (path.empty()) break;
            const int back = path.back();
            path.pop_back();
            u = head_[std::size_t(mate_[std::size_t(back)])];
            ++next_[std::size_t(u)];
        }
        return total;
    }

    int n_, s_, t_;
    std::vector<int> first_, head_, mate_, level_, next_;
    std::vector<Capacity> cap_;
};

}  // namespace

MaxFlowResult max_flow(const FlowGraph& g) {
    Residual r(g);
    MaxFlowResult out;
    out.flow = r.run();
    out.source_side = r.source_side();
    return out;
}

Capacity cut_capacity(const FlowGraph& g, const std::vector<bool>& source_side) {
    Capacity c = 0;
    for (const auto& a : g.arcs()) {
        if (source_side[std::size_t(a.from)] && !source_side[std::size_t(a.to)]) c += a.capacity;
        if (source_side[std::size_t(a.to)] && !source_side[std::size_t(a.from)]) c += a.reverse_capacity;
    }
    return c;
}

}  // namespace uwr::gcstereo
