#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uag/rng.hpp"

namespace uag {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

inline constexpr std::size_t kInfinity = std::numeric_limits<std::size_t>::max();

// Undirected simple graph on {1..n} with sorted adjacency lists.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n, std::size_t m_hint = 0);

    // Validates: endpoints in range, no loops, no duplicates.
    static Graph from_edges(std::size_t n, const std::vector<Edge>& edges, std::size_t m_hint = 0);

    std::size_t order() const { return n_; }
    std::size_t size() const { return edge_count_; }
    std::size_t m_hint() const { return m_hint_; }

    std::span<const Vertex> neighbors(Vertex v) const;
    std::size_t degree(Vertex v) const;
    bool adjacent(Vertex u, Vertex v) const;
    bool contains(Vertex v) const { return v >= 1 && v <= n_; }
    void check_vertex(Vertex v) const;

    // Edges (u, v) with u < v in lexicographic order.
    std::vector<Edge> edges() const;

    // Appends vertex n+1 joined to the given distinct existing vertices.
    Vertex append_vertex(std::span<const Vertex> targets);
    void add_edge(Vertex u, Vertex v);

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.adj_ == b.adj_;
    }

private:
    std::size_t n_ = 0;
    std::size_t m_hint_ = 0;
    std::size_t edge_count_ = 0;
    std::vector<std::vector<Vertex>> adj_;  // index 0 unused
};

struct GenParams {
    std::size_t n = 0;
    std::size_t m = 1;
    std::uint64_t seed = 0;
};

struct Cycle {
    std::vector<Vertex> vertices;
    std::size_t length() const { return vertices.size(); }
    auto operator<=>(const Cycle&) const = default;
};

// Rotate/reflect so the cycle starts at its minimum and the second entry is the smaller neighbour.
Cycle canonical_cycle(std::vector<Vertex> seq);

Graph complete_graph(std::size_t m);
Graph attach_step(const Graph& g, std::size_t m, Rng& rng);
Graph generate(const GenParams& p);

// Uniform m-subset of {1..n} (Floyd), sorted.
std::vector<Vertex> sample_subset(std::size_t n, std::size_t m, Rng& rng);

// In-place growth of one G_{n,m} trajectory.
class GrowthProcess {
public:
    GrowthProcess(std::size_t m, std::uint64_t seed);
    GrowthProcess(std::size_t m, Rng rng);
    GrowthProcess(Graph start, std::size_t m, Rng rng);
    // Adds vertex n+1; returns its neighbours.
    std::span<const Vertex> step();
    void grow_to(std::size_t n);
    const Graph& graph() const { return g_; }
    Graph take() && { return std::move(g_); }

private:
    std::size_t m_;
    Rng rng_;
    Graph g_;
    std::vector<Vertex> last_;
};

std::size_t degree(const Graph& g, Vertex v);
std::size_t distance(const Graph& g, Vertex u, Vertex v);
std::size_t set_distance(const Graph& g, const std::vector<Vertex>& a, const std::vector<Vertex>& b);

// Full BFS from sources; result indexed by vertex (size n+1), kInfinity if unreached.
std::vector<std::size_t> bfs_distances(const Graph& g, std::span<const Vertex> sources,
                                       std::size_t max_depth = kInfinity);

struct Subgraph {
    Graph graph;                 // vertices 1..k
    std::vector<Vertex> labels;  // labels[i-1] = host vertex of local i, ascending
    Vertex local(Vertex host) const;  // 0 if absent
};

Subgraph induced_subgraph(const Graph& g, std::vector<Vertex> vertices);
Subgraph ball(const Graph& g, Vertex center, std::size_t radius);

inline constexpr std::size_t kDefaultCycleBudget = 2'000'000;

// Every simple cycle of length 3..a, sorted; throws ResourceLimit past
// max_cycles.
std::vector<Cycle> cycles_up_to(const Graph& g, std::size_t a, std::size_t max_cycles = kDefaultCycleBudget);

// Reusable bounded BFS over a large graph. Distances are valid for vertices
// reached in the latest run only.
class LocalBfs {
public:
    explicit LocalBfs(const Graph& g);

    template <class Allowed>
    const std::vector<Vertex>& run(std::span<const Vertex> sources, std::size_t max_depth, Allowed allowed);
    const std::vector<Vertex>& run(std::span<const Vertex> sources, std::size_t max_depth) {
        return run(sources, max_depth, [](Vertex) { return true; });
    }
    const std::vector<Vertex>& run(Vertex source, std::size_t max_depth) {
        return run(std::span<const Vertex>(&source, 1), max_depth);
    }
    template <class Allowed>
    const std::vector<Vertex>& run(Vertex source, std::size_t max_depth, Allowed allowed) {
        return run(std::span<const Vertex>(&source, 1), max_depth, allowed);
    }

    std::size_t dist(Vertex v) const { return stamp_[v] == epoch_ ? dist_[v] : kInfinity; }
    bool reached(Vertex v) const { return stamp_[v] == epoch_; }
    const std::vector<Vertex>& order() const { return order_; }
    const Graph& graph() const { return *g_; }

private:
    const Graph* g_;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint32_t> dist_;
    std::vector<Vertex> order_;
    std::uint32_t epoch_ = 0;
};

template <class Allowed>
const std::vector<Vertex>& LocalBfs::run(std::span<const Vertex> sources, std::size_t max_depth,
                                         Allowed allowed) {
    if (++epoch_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        epoch_ = 1;
    }
    order_.clear();
    for (Vertex s : sources) {
        if (stamp_[s] == epoch_ || !allowed(s)) continue;
        stamp_[s] = epoch_;
        dist_[s] = 0;
        order_.push_back(s);
    }
    for (std::size_t head = 0; head < order_.size(); ++head) {
        Vertex v = order_[head];
        if (dist_[v] >= max_depth) continue;
        for (Vertex w : g_->neighbors(v)) {
            if (stamp_[w] == epoch_ || !allowed(w)) continue;
            stamp_[w] = epoch_;
            dist_[w] = dist_[v] + 1;
            order_.push_back(w);
        }
    }
    return order_;
}

void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);
void save_graph(const std::string& path, const Graph& g);
Graph load_graph(const std::string& path);

} // namespace uag
