#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "uag/error.hpp"
#include "uag/strategy.hpp"

namespace uag::strategy {

namespace {

struct Shape {
    std::size_t a = 0;
    std::size_t girth = 0;  // no cycle of this length or shorter except planted ones
    std::size_t depth = 0;  // distance from a tree's parent to its leaves
    std::size_t copies = 0;
};

Shape shape_of(const SyntheticSpec& spec) {
    if (spec.m < 3) throw DomainError("synthetic context: m must be at least 3");
    if (spec.R < 1 || spec.R > 19) throw DomainError("synthetic context: R must lie in 1..19");
    if (spec.n0 < 1 || spec.n0 > spec.N0) throw DomainError("synthetic context: need 1 <= n0 <= N0");
    Shape s;
    s.a = 1;
    for (std::size_t i = 0; i < spec.R; ++i) s.a *= 3;
    s.girth = std::max(s.a, (std::size_t{1} << (spec.R + 1)) + 1);
    s.depth = (s.girth + 1) / 2;
    s.copies = spec.copies ? spec.copies : spec.m;
    return s;
}

std::size_t sat_add(std::size_t a, std::size_t b) { return a > kInfinity - b ? kInfinity : a + b; }
std::size_t sat_mul(std::size_t a, std::size_t b) { return b != 0 && a > kInfinity / b ? kInfinity : a * b; }

// Random tree on [N0], shared by both graphs.
std::vector<Edge> core_tree(const SyntheticSpec& spec) {
    Rng rng = Rng::for_path(spec.seed, {0});
    std::vector<Edge> e;
    for (Vertex v = 2; v <= spec.N0; ++v) e.push_back({Vertex(1 + rng.below(v - 1)), v});
    return e;
}

class Builder {
public:
    Builder(const SyntheticSpec& spec, const Shape& shape, Rng rng) : spec_(spec), shape_(shape), rng_(rng) {}

    Graph build() {
        auto core = core_tree(spec_);
        adj_.assign(spec_.N0 + 1, {});
        for (auto [u, v] : core) link(u, v);
        for (Vertex v = 1; v <= spec_.N0; ++v) {
            std::size_t want = spec_.N0 + spec_.m - adj_[v].size();
            for (std::size_t k = 0; k < want; ++k) hang_tree(v);
        }
        for (std::size_t b = 3; b <= shape_.a; ++b)
            for (std::size_t c = 0; c < shape_.copies; ++c) {
                Vertex first = fresh();
                Vertex prev = first;
                for (std::size_t i = 1; i < b; ++i) {
                    Vertex v = fresh();
                    link(prev, v);
                    prev = v;
                }
                link(prev, first);
                for (Vertex v = first; v < first + b; ++v)
                    for (std::size_t k = 0; k + 2 < spec_.m; ++k) hang_tree(v);
            }
        if (stubs_.size() % 2) stubs_.push_back(stubs_.front());
        pair_stubs();
        remove_short_cycles();
        return finish();
    }

private:
    Vertex fresh() {
        adj_.emplace_back();
        return Vertex(adj_.size() - 1);
    }
    void link(Vertex u, Vertex v) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    void unlink(Vertex u, Vertex v) {
        adj_[u].erase(std::find(adj_[u].begin(), adj_[u].end(), v));
        adj_[v].erase(std::find(adj_[v].begin(), adj_[v].end(), u));
    }
    bool linked(Vertex u, Vertex v) const { return std::find(adj_[u].begin(), adj_[u].end(), v) != adj_[u].end(); }

    // A tree below p with at least m-1 children per inner vertex; its
    // leaves, at distance `depth` from p, get m-1 or m free stubs. The
    // occasional extra child or stub keeps degrees uneven.
    void hang_tree(Vertex p) {
        std::vector<Vertex> level{fresh()};
        link(p, level[0]);
        for (std::size_t d = 1; d < shape_.depth; ++d) {
            std::vector<Vertex> next;
            for (Vertex v : level)
                for (std::size_t k = 0, kids = spec_.m - 1 + (rng_.below(16) == 0); k < kids; ++k) {
                    Vertex c = fresh();
                    link(v, c);
                    next.push_back(c);
                }
            level = std::move(next);
        }
        for (Vertex v : level)
            for (std::size_t k = 0, n = spec_.m - 1 + (rng_.below(4) == 0); k < n; ++k) stubs_.push_back(v);
    }

    void pair_stubs() {
        for (std::size_t i = stubs_.size(); i > 1; --i) std::swap(stubs_[i - 1], stubs_[rng_.below(i)]);
        for (std::size_t i = 0; i < stubs_.size(); i += 2) random_.push_back({stubs_[i], stubs_[i + 1]});
        // loops and repeated pairs are switched against random partners
        for (std::size_t pass = 0; pass < 100; ++pass) {
            bool clean = true;
            std::vector<Edge> seen;
            for (std::size_t i = 0; i < random_.size(); ++i) {
                auto [p, q] = random_[i];
                Edge key{std::min(p, q), std::max(p, q)};
                bool bad = p == q || std::binary_search(seen.begin(), seen.end(), key);
                if (!bad) {
                    seen.insert(std::upper_bound(seen.begin(), seen.end(), key), key);
                    continue;
                }
                clean = false;
                std::size_t j = rng_.below(random_.size());
                std::swap(random_[i].second, random_[j].second);
            }
            if (clean) break;
        }
        for (auto [p, q] : random_) {
            if (p == q || linked(p, q)) throw ExhaustionError("synthetic context: could not make the pairing simple");
            link(p, q);
        }
    }

    // Whether p and q are joined by a path of length < girth avoiding the edge pq.
    bool short_cycle_through(Vertex p, Vertex q) {
        const std::size_t limit = shape_.girth - 1;
        const std::size_t hp = (limit + 1) / 2, hq = limit / 2;
        if (mark_.size() < adj_.size()) {
            mark_.assign(adj_.size(), 0);
            dist_.assign(adj_.size(), 0);
        }
        ++epoch_;
        std::vector<Vertex> q1{p};
        mark_[p] = epoch_;
        dist_[p] = 0;
        for (std::size_t h = 0; h < q1.size(); ++h) {
            Vertex v = q1[h];
            if (dist_[v] >= hp) continue;
            for (Vertex w : adj_[v]) {
                if ((v == p && w == q) || mark_[w] == epoch_) continue;
                mark_[w] = epoch_;
                dist_[w] = dist_[v] + 1;
                q1.push_back(w);
            }
        }
        std::vector<std::pair<Vertex, std::size_t>> q2{{q, 0}};
        std::vector<Vertex> seen{q};
        for (std::size_t h = 0; h < q2.size(); ++h) {
            auto [v, d] = q2[h];
            if (mark_[v] == epoch_ && dist_[v] + d <= limit) return true;
            if (d >= hq) continue;
            for (Vertex w : adj_[v]) {
                if (v == q && w == p) continue;
                if (std::find(seen.begin(), seen.end(), w) != seen.end()) continue;
                seen.push_back(w);
                q2.push_back({w, d + 1});
            }
        }
        return false;
    }

    void remove_short_cycles() {
        for (std::size_t pass = 0; pass < 60; ++pass) {
            bool clean = true;
            for (std::size_t i = 0; i < random_.size(); ++i) {
                auto [p, q] = random_[i];
                if (!short_cycle_through(p, q)) continue;
                clean = false;
                for (int attempt = 0; attempt < 200; ++attempt) {
                    std::size_t j = rng_.below(random_.size());
                    if (j == i) continue;
                    auto [r, s] = random_[j];
                    if (rng_.below(2)) std::swap(r, s);
                    if (p == r || q == s || linked(p, r) || linked(q, s)) continue;
                    unlink(p, q);
                    unlink(random_[j].first, random_[j].second);
                    link(p, r);
                    link(q, s);
                    if (!short_cycle_through(p, r) && !short_cycle_through(q, s)) {
                        random_[i] = {p, r};
                        random_[j] = {q, s};
                        break;
                    }
                    unlink(p, r);
                    unlink(q, s);
                    link(p, q);
                    link(random_[j].first, random_[j].second);
                }
            }
            if (clean) return;
        }
        throw ExhaustionError("synthetic context: short cycles survived the switching passes");
    }

    Graph finish() {
        const std::size_t n = adj_.size() - 1;
        std::vector<Vertex> label(n + 1);
        std::iota(label.begin(), label.end(), Vertex{0});
        for (std::size_t i = n; i > spec_.N0 + 1; --i)
            std::swap(label[i], label[spec_.N0 + 1 + rng_.below(i - spec_.N0)]);
        std::vector<Edge> e;
        for (Vertex v = 1; v <= n; ++v)
            for (Vertex w : adj_[v])
                if (v < w) e.push_back({label[v], label[w]});
        return Graph::from_edges(n, e);
    }

    const SyntheticSpec& spec_;
    const Shape& shape_;
    Rng rng_;
    std::vector<std::vector<Vertex>> adj_;
    std::vector<Vertex> stubs_;
    std::vector<Edge> random_;
    std::vector<std::uint32_t> mark_;
    std::vector<std::size_t> dist_;
    std::uint32_t epoch_ = 0;
};

} // namespace

std::size_t synthetic_order(const SyntheticSpec& spec) {
    Shape s = shape_of(spec);
    std::size_t tree = 0, level = 1;
    for (std::size_t d = 0; d < s.depth; ++d) {
        tree = sat_add(tree, level);
        level = sat_mul(level, spec.m - 1);
    }
    std::size_t trees = 0;
    std::vector<std::size_t> deg(spec.N0 + 1, 0);
    for (auto [u, v] : core_tree(spec)) ++deg[u], ++deg[v];
    for (Vertex v = 1; v <= spec.N0; ++v) trees += spec.N0 + spec.m - deg[v];
    std::size_t cycle_vertices = 0;
    for (std::size_t b = 3; b <= s.a; ++b) cycle_vertices = sat_add(cycle_vertices, sat_mul(b, s.copies));
    trees = sat_add(trees, sat_mul(cycle_vertices, spec.m - 2));
    return sat_add(sat_add(spec.N0, cycle_vertices), sat_mul(trees, tree));
}

MatchContext synthetic_context(const SyntheticSpec& spec) {
    Shape shape = shape_of(spec);
    const std::size_t order = synthetic_order(spec);
    if (order > spec.max_vertices)
        throw ResourceLimit("synthetic context needs about " +
                            (order == kInfinity ? std::string("overflow") : std::to_string(order)) +
                            " vertices per graph (limit " + std::to_string(spec.max_vertices) + ")");
    std::string last;
    for (std::uint64_t attempt = 0; attempt < 4; ++attempt) {
        Graph h1 = Builder(spec, shape, Rng::for_path(spec.seed, {1, attempt})).build();
        Graph h2 = Builder(spec, shape, Rng::for_path(spec.seed, {2, attempt})).build();
        MatchContext ctx(std::move(h1), std::move(h2), spec.n0, spec.N0, spec.m, spec.R);
        auto v = validate_context(ctx);
        if (v.ok) return ctx;
        last = v.failures.front();
    }
    throw ExhaustionError("synthetic context failed validation: " + last);
}

std::optional<MatchContext> sample_generated_context(std::size_t n, std::size_t m, std::size_t R, std::size_t n0,
                                                     std::size_t N0, std::uint64_t seed, std::size_t tries) {
    if (N0 > n) throw DomainError("sampled context: N0 exceeds n");
    for (std::uint64_t i = 0; i < tries; ++i) {
        GrowthProcess p1(m, Rng::for_path(seed, {n, i, 1}));
        p1.grow_to(n);
        Graph g1 = std::move(p1).take();
        std::vector<Vertex> prefix(std::max(N0, m));
        std::iota(prefix.begin(), prefix.end(), Vertex{1});
        GrowthProcess p2(induced_subgraph(g1, prefix).graph, m, Rng::for_path(seed, {n, i, 2}));
        p2.grow_to(n);
        MatchContext ctx(std::move(g1), std::move(p2).take(), n0, N0, m, R);
        if (validate_context(ctx).ok) return ctx;
    }
    return std::nullopt;
}

MatchContext load_context(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open context file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("context file " + path + ": " + e.what());
    }
    auto dir = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (dir / fp).string();
    };
    try {
        MatchContext ctx(load_graph(resolve(j.at("graph1").get<std::string>())),
                         load_graph(resolve(j.at("graph2").get<std::string>())), j.at("n0").get<std::size_t>(),
                         j.at("N0").get<std::size_t>(), j.at("m").get<std::size_t>(), j.at("R").get<std::size_t>());
        return ctx;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("context file " + path + ": " + e.what());
    }
}

void save_context(const std::string& path, const MatchContext& ctx, const std::string& graph1,
                  const std::string& graph2) {
    auto dir = std::filesystem::path(path).parent_path();
    save_graph((dir / graph1).string(), ctx.h1());
    save_graph((dir / graph2).string(), ctx.h2());
    nlohmann::json j{{"graph1", graph1}, {"graph2", graph2}, {"n0", ctx.n0()},
                     {"N0", ctx.N0()},   {"m", ctx.m()},       {"R", ctx.R()}};
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write context file " + path);
    out << j.dump(2) << '\n';
}

} // namespace uag::strategy
