#include "uag/structure.hpp"

#include <algorithm>
#include <cmath>

#include "uag/canonical.hpp"
#include "uag/error.hpp"

namespace uag::structure {

void StructureParams::validate() const {
    if (a < 3) throw DomainError("structure: a must be at least 3");
    if (n0 < 1) throw DomainError("structure: n0 must be at least 1");
    if (N0 < n0) throw DomainError("structure: N0 must be at least n0");
    if (K < 1) throw DomainError("structure: K must be at least 1");
}

namespace {

void require_core(const Graph& g, const StructureParams& p) {
    p.validate();
    if (p.N0 > g.order()) throw DomainError("structure: N0 exceeds the number of vertices");
}

bool inside(const std::vector<Vertex>& vs, std::size_t bound) {
    return std::all_of(vs.begin(), vs.end(), [&](Vertex v) { return v <= bound; });
}

// Simple-path search for clauses 1 and 2. Finds a simple path of at most
// `max_len` edges from `start` to a vertex of [n0] (distinct from the
// start) that visits a vertex outside [N0].
class PathSearch {
public:
    PathSearch(const Graph& g, const StructureParams& p, const std::vector<std::size_t>& core_dist)
        : g_(g), p_(p), core_dist_(core_dist), on_path_(g.order() + 1, 0) {}

    std::optional<std::vector<Vertex>> find(Vertex start, std::size_t max_len, Vertex min_end = 0) {
        max_len_ = max_len;
        min_end_ = min_end;
        path_.assign(1, start);
        on_path_[start] = 1;
        bool found = dfs(start > p_.N0 ? 1 : 0);
        on_path_[start] = 0;
        for (Vertex v : path_) on_path_[v] = 0;
        if (found) return path_;
        return std::nullopt;
    }

private:
    bool dfs(std::size_t outside) {
        if (++steps_ > p_.node_budget) throw ResourceLimit("structure: path search exceeded node budget");
        Vertex v = path_.back();
        std::size_t len = path_.size() - 1;
        for (Vertex w : g_.neighbors(v)) {
            if (on_path_[w]) continue;
            if (len + 1 + core_dist_[w] > max_len_) continue;
            std::size_t out = outside + (w > p_.N0 ? 1 : 0);
            path_.push_back(w);
            if (w <= p_.n0 && out > 0 && w > min_end_) return true;
            on_path_[w] = 1;
            if (dfs(out)) return true;
            on_path_[w] = 0;
            path_.pop_back();
        }
        return false;
    }

    const Graph& g_;
    const StructureParams& p_;
    const std::vector<std::size_t>& core_dist_;
    std::vector<char> on_path_;
    std::vector<Vertex> path_;
    std::size_t max_len_ = 0;
    Vertex min_end_ = 0;
    std::size_t steps_ = 0;
};

std::vector<Vertex> core_vertices(std::size_t n0) {
    std::vector<Vertex> c(n0);
    for (std::size_t i = 0; i < n0; ++i) c[i] = static_cast<Vertex>(i + 1);
    return c;
}

// Shortest path from [n0] to the nearest vertex of `target`.
std::vector<Vertex> path_to_core(const Graph& g, std::size_t n0, const std::vector<Vertex>& target) {
    std::vector<Vertex> parent(g.order() + 1, 0);
    std::vector<char> seen(g.order() + 1, 0);
    std::vector<char> goal(g.order() + 1, 0);
    for (Vertex t : target) goal[t] = 1;
    std::vector<Vertex> queue = core_vertices(n0);
    for (Vertex s : queue) seen[s] = 1;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        Vertex v = queue[i];
        if (goal[v]) {
            std::vector<Vertex> path{v};
            while (parent[path.back()] != 0) path.push_back(parent[path.back()]);
            std::reverse(path.begin(), path.end());
            return path;
        }
        for (Vertex w : g.neighbors(v))
            if (!seen[w]) {
                seen[w] = 1;
                parent[w] = v;
                queue.push_back(w);
            }
    }
    return {};
}

Q1Report q1_with(const Graph& g, const StructureParams& p, const std::vector<Cycle>& cycles) {
    Q1Report rep;
    auto core = core_vertices(p.n0);
    auto core_dist = bfs_distances(g, core);
    auto add = [&](Q1Violation v) {
        rep.pass = false;
        rep.violations.push_back(std::move(v));
        return p.stop_at_first;
    };
    auto cycle_core_dist = [&](const Cycle& c) {
        std::size_t d = kInfinity;
        for (Vertex v : c.vertices) d = std::min(d, core_dist[v]);
        return d;
    };

    PathSearch search(g, p, core_dist);

    // clause 1
    for (const auto& c : cycles) {
        if (cycle_core_dist(c) >= p.a) continue;
        if (!inside(c.vertices, p.N0)) {
            if (add({1, c.vertices, {}, path_to_core(g, p.n0, c.vertices)})) return rep;
            continue;
        }
        for (Vertex s : c.vertices) {
            if (auto path = search.find(s, p.a)) {
                std::reverse(path->begin(), path->end());
                if (add({1, c.vertices, {}, *path})) return rep;
                break;
            }
        }
    }

    // clause 2: at most a vertices, so at most a-1 edges
    for (Vertex s : core) {
        if (auto path = search.find(s, p.a - 1, s)) {
            if (add({2, {}, {}, *path})) return rep;
        }
    }

    // clause 3
    std::vector<const Cycle*> outer;
    for (const auto& c : cycles)
        if (std::all_of(c.vertices.begin(), c.vertices.end(), [&](Vertex v) { return v > p.n0; }))
            outer.push_back(&c);
    std::vector<std::vector<std::uint32_t>> owner(g.order() + 1);
    for (std::size_t i = 0; i < outer.size(); ++i)
        for (Vertex v : outer[i]->vertices) owner[v].push_back(static_cast<std::uint32_t>(i));
    LocalBfs bfs(g);
    for (std::size_t i = 0; i < outer.size(); ++i) {
        std::vector<char> hit(outer.size(), 0);
        for (Vertex v : bfs.run(outer[i]->vertices, p.a - 1))
            for (std::uint32_t j : owner[v])
                if (j > i && !hit[j]) {
                    hit[j] = 1;
                    if (add({3, outer[i]->vertices, outer[j]->vertices, {}})) return rep;
                }
    }
    return rep;
}

Q2Report q2_with(const StructureParams& p, const std::vector<Cycle>& cycles) {
    Q2Report rep;
    rep.counts.assign(p.a + 1, 0);
    for (const auto& c : cycles)
        if (std::all_of(c.vertices.begin(), c.vertices.end(), [&](Vertex v) { return v > p.N0; }))
            ++rep.counts[c.length()];
    for (std::size_t b = 3; b <= p.a; ++b)
        if (rep.counts[b] < p.K) rep.pass = false;
    return rep;
}

bool is_cycle(const Graph& g, const std::vector<Vertex>& c, std::size_t a) {
    if (c.size() < 3 || c.size() > a) return false;
    std::vector<Vertex> s = c;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) return false;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!g.contains(c[i]) || !g.contains(c[(i + 1) % c.size()]) || !g.adjacent(c[i], c[(i + 1) % c.size()]))
            return false;
    return true;
}

bool is_simple_path(const Graph& g, const std::vector<Vertex>& path) {
    if (path.empty()) return false;
    std::vector<Vertex> s = path;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) return false;
    for (Vertex v : path)
        if (!g.contains(v)) return false;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (!g.adjacent(path[i], path[i + 1])) return false;
    return true;
}

} // namespace

Q1Report check_q1(const Graph& g, const StructureParams& p) {
    require_core(g, p);
    return q1_with(g, p, cycles_up_to(g, p.a));
}

Q2Report check_q2(const Graph& g, const StructureParams& p) {
    p.validate();
    std::vector<Vertex> outer;
    for (Vertex v = static_cast<Vertex>(p.N0 + 1); v <= g.order(); ++v) outer.push_back(v);
    Subgraph sub = induced_subgraph(g, outer);
    auto cycles = cycles_up_to(sub.graph, p.a);
    for (auto& c : cycles)
        for (auto& v : c.vertices) v = sub.labels[v - 1];
    return q2_with(p, cycles);
}

Q3Report check_q3(const Graph& g, const StructureParams& p) {
    require_core(g, p);
    Q3Report rep;
    rep.threshold = p.q3_threshold();
    for (Vertex v = 1; v <= p.N0; ++v)
        if (g.degree(v) < rep.threshold) {
            rep.pass = false;
            rep.offending.push_back(v);
        }
    return rep;
}

StructureReport check_all(const Graph& g, const StructureParams& p) {
    require_core(g, p);
    auto cycles = cycles_up_to(g, p.a);
    return {q1_with(g, p, cycles), q2_with(p, cycles), check_q3(g, p)};
}

bool violation_holds(const Graph& g, const StructureParams& p, const Q1Violation& v) {
    auto core = core_vertices(p.n0);
    auto in_core = [&](Vertex x) { return x >= 1 && x <= p.n0; };
    auto leaves = [&](const std::vector<Vertex>& path) {
        return std::any_of(path.begin(), path.end(), [&](Vertex x) { return x > p.N0; });
    };
    switch (v.clause) {
    case 1: {
        if (!is_cycle(g, v.cycle, p.a)) return false;
        if (set_distance(g, v.cycle, core) >= p.a) return false;
        if (!inside(v.cycle, p.N0)) return true;
        const auto& path = v.path;
        if (!is_simple_path(g, path) || path.size() - 1 > p.a || !leaves(path)) return false;
        return in_core(path.front()) &&
               std::find(v.cycle.begin(), v.cycle.end(), path.back()) != v.cycle.end();
    }
    case 2: {
        const auto& path = v.path;
        return is_simple_path(g, path) && path.size() >= 2 && path.size() <= p.a && in_core(path.front()) &&
               in_core(path.back()) && leaves(path);
    }
    case 3: {
        if (!is_cycle(g, v.cycle, p.a) || !is_cycle(g, v.cycle2, p.a)) return false;
        if (canonical_cycle(v.cycle) == canonical_cycle(v.cycle2)) return false;
        auto outer = [&](const std::vector<Vertex>& c) {
            return std::all_of(c.begin(), c.end(), [&](Vertex x) { return x > p.n0; });
        };
        return outer(v.cycle) && outer(v.cycle2) && set_distance(g, v.cycle, v.cycle2) < p.a;
    }
    default:
        return false;
    }
}

DegreeStats degree_trajectory(const GenParams& p, const std::vector<std::size_t>& checkpoints) {
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
        (!checkpoints.empty() && checkpoints.front() < p.m))
        throw DomainError("degree_trajectory: checkpoints must be increasing and at least m");
    DegreeStats out;
    GrowthProcess proc(p.m, p.seed);
    std::size_t delta = p.m - 1;
    for (std::size_t n : checkpoints) {
        while (proc.graph().order() < n) {
            for (Vertex u : proc.step()) delta = std::max(delta, proc.graph().degree(u));
            delta = std::max(delta, p.m);
        }
        out.n.push_back(n);
        out.max_degree.push_back(delta);
        double l = std::log(static_cast<double>(n));
        out.ratio.push_back(n > 1 ? static_cast<double>(delta) / (l * l) : 0.0);
    }
    return out;
}

std::vector<std::uint64_t> cycles_closed_by(const Graph& g, Vertex v, std::size_t a) {
    if (a < 3) throw DomainError("cycles_closed_by: a must be at least 3");
    std::vector<std::uint64_t> counts(a + 1, 0);
    LocalBfs bfs(g);
    bfs.run(v, a / 2, [v](Vertex w) { return w <= v; });
    std::vector<Vertex> path{v};
    std::vector<char> on_path(g.order() + 1, 0);
    on_path[v] = 1;
    auto dfs = [&](auto&& self) -> void {
        Vertex u = path.back();
        std::size_t len = path.size() - 1;
        for (Vertex w : g.neighbors(u)) {
            if (w > v) continue;
            if (w == v) {
                if (len + 1 >= 3 && path[1] < path.back()) ++counts[len + 1];
                continue;
            }
            if (on_path[w] || !bfs.reached(w) || len + 1 + bfs.dist(w) > a) continue;
            path.push_back(w);
            on_path[w] = 1;
            self(self);
            on_path[w] = 0;
            path.pop_back();
        }
    };
    dfs(dfs);
    return counts;
}

CycleStats cycle_trajectory(const GenParams& p, std::size_t a, const std::vector<std::size_t>& checkpoints) {
    if (a < 3) throw DomainError("cycle_trajectory: a must be at least 3");
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
        (!checkpoints.empty() && checkpoints.front() < p.m))
        throw DomainError("cycle_trajectory: checkpoints must be increasing and at least m");
    CycleStats out;
    GrowthProcess proc(p.m, p.seed);
    std::vector<std::uint64_t> counts(a + 1, 0);
    for (const auto& c : cycles_up_to(proc.graph(), a)) ++counts[c.length()];
    for (std::size_t n : checkpoints) {
        while (proc.graph().order() < n) {
            proc.step();
            auto add = cycles_closed_by(proc.graph(), static_cast<Vertex>(proc.graph().order()), a);
            for (std::size_t k = 3; k <= a; ++k) counts[k] += add[k];
        }
        out.n.push_back(n);
        out.counts.push_back(counts);
    }
    return out;
}

std::string to_string(Neighborhood n) {
    switch (n) {
    case Neighborhood::TreeTrivial: return "tree-trivial";
    case Neighborhood::TreeNontrivial: return "tree-nontrivial";
    case Neighborhood::UnicyclicTrivial: return "unicyclic-trivial";
    case Neighborhood::UnicyclicNontrivial: return "unicyclic-nontrivial";
    case Neighborhood::CoreAdjacent: return "core-adjacent";
    case Neighborhood::Complex: return "complex";
    }
    return "?";
}

Neighborhood neighborhood_classification(const Graph& g, Vertex v, std::size_t radius, std::size_t a,
                                         std::size_t core) {
    if (a < 1) throw DomainError("neighborhood_classification: a must be positive");
    Subgraph b = ball(g, v, radius);
    if (core > 0 && b.labels.front() <= core) return Neighborhood::CoreAdjacent;
    std::size_t cyclomatic = b.graph.size() + 1 - b.graph.order();
    Vertex root = b.local(v);
    if (cyclomatic == 0)
        return canon::a_trivial(canon::RootedTree::from_graph(b.graph, root), a) ? Neighborhood::TreeTrivial
                                                                                 : Neighborhood::TreeNontrivial;
    if (cyclomatic == 1) {
        if (a < 2) throw DomainError("neighborhood_classification: unicyclic balls need a >= 2");
        return canon::unicyclic_a_trivial(canon::RootedUnicyclic(b.graph, root), a - 1)
                   ? Neighborhood::UnicyclicTrivial
                   : Neighborhood::UnicyclicNontrivial;
    }
    return Neighborhood::Complex;
}

std::vector<GridResult> search_parameters(const SearchConfig& cfg) {
    std::vector<GridResult> out;
    for (const auto& pt : cfg.grid) out.push_back({pt});
    for (std::size_t i = 0; i < cfg.seeds; ++i) {
        GrowthProcess proc(cfg.m, Rng::for_path(cfg.base_seed, {cfg.n, i}));
        proc.grow_to(cfg.n);
        const Graph& g = proc.graph();
        auto cycles = cycles_up_to(g, cfg.a);
        for (auto& r : out) {
            StructureParams p;
            p.a = cfg.a;
            p.n0 = r.point.n0;
            p.N0 = r.point.N0;
            p.K = cfg.K;
            p.m = cfg.m;
            p.q3_form = cfg.q3_form;
            p.stop_at_first = true;
            require_core(g, p);
            bool q1 = q1_with(g, p, cycles).pass;
            bool q2 = q2_with(p, cycles).pass;
            bool q3 = check_q3(g, p).pass;
            ++r.trials;
            r.q1 += q1;
            r.q2 += q2;
            r.q3 += q3;
            r.all += q1 && q2 && q3;
        }
    }
    return out;
}

} // namespace uag::structure
