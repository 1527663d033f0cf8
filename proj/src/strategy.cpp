#include "uag/strategy.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <tuple>

#include "uag/canonical.hpp"
#include "uag/error.hpp"
#include "uag/structure.hpp"

namespace uag::strategy {

using game::Side;

namespace {

int index_of(Side s) { return s == Side::G ? 0 : 1; }
Side side_of(int s) { return s == 0 ? Side::G : Side::H; }

std::size_t pow3(std::size_t r) {
    std::size_t a = 1;
    for (std::size_t i = 0; i < r; ++i) a *= 3;
    return a;
}

bool contains_sorted(const std::vector<Vertex>& s, Vertex v) { return std::binary_search(s.begin(), s.end(), v); }

std::vector<std::size_t> core_bfs(const Graph& g, std::size_t n0, std::size_t N0) {
    std::vector<std::size_t> d(g.order() + 1, kInfinity);
    std::vector<Vertex> q;
    for (Vertex v = 1; v <= n0; ++v) {
        d[v] = 0;
        q.push_back(v);
    }
    for (std::size_t h = 0; h < q.size(); ++h)
        for (Vertex w : g.neighbors(q[h]))
            if (w <= N0 && d[w] == kInfinity) {
                d[w] = d[q[h]] + 1;
                q.push_back(w);
            }
    return d;
}

} // namespace

// ---------------------------------------------------------------- context

MatchContext::MatchContext(Graph h1, Graph h2, std::size_t n0, std::size_t N0, std::size_t m, std::size_t R)
    : h1_(std::move(h1)), h2_(std::move(h2)), n0_(n0), N0_(N0), m_(m), R_(R) {
    if (m_ < 3) throw DomainError("context: m must be at least 3");
    if (R_ < 1 || R_ > 19) throw DomainError("context: R must lie in 1..19");
    if (n0_ < 1 || n0_ > N0_) throw DomainError("context: need 1 <= n0 <= N0");
    if (N0_ > h1_.order() || N0_ > h2_.order()) throw DomainError("context: N0 exceeds a graph order");
    std::vector<Vertex> src(n0_);
    std::iota(src.begin(), src.end(), Vertex{1});
    base1_ = bfs_distances(h1_, src);
    base2_ = bfs_distances(h2_, src);
    core_ = core_bfs(h1_, n0_, N0_);
    cycle_limit_ = std::max(a(), (std::size_t{1} << (R_ + 1)) + 1);
}

std::size_t MatchContext::a() const { return pow3(R_); }

std::size_t MatchContext::base_distance(Side s, Vertex v) const {
    graph(s).check_vertex(v);
    return s == Side::G ? base1_[v] : base2_[v];
}

std::size_t MatchContext::core_distance(Vertex v) const { return v >= 1 && v <= N0_ ? core_[v] : kInfinity; }

const std::vector<Cycle>& MatchContext::outer_cycles(Side s) const { return s == Side::G ? cycles1_ : cycles2_; }

Validation validate_context(MatchContext& ctx) {
    Validation out;
    auto fail = [&](std::string msg) { out.failures.push_back(std::move(msg)); };
    const Graph* gs[2] = {&ctx.h1_, &ctx.h2_};
    for (int s = 0; s < 2; ++s) {
        const Graph& g = *gs[s];
        for (Vertex v = 1; v <= g.order(); ++v)
            if (g.degree(v) < ctx.m_) {
                fail("H" + std::to_string(s + 1) + ": vertex " + std::to_string(v) + " has degree " +
                     std::to_string(g.degree(v)) + " < m");
                break;
            }
    }
    for (Vertex v = 1; v <= ctx.N0_; ++v) {
        std::vector<Vertex> a, b;
        for (Vertex w : ctx.h1_.neighbors(v))
            if (w <= ctx.N0_) a.push_back(w);
        for (Vertex w : ctx.h2_.neighbors(v))
            if (w <= ctx.N0_) b.push_back(w);
        if (a != b) {
            fail("H1 and H2 differ on [N0] at vertex " + std::to_string(v));
            break;
        }
    }
    structure::StructureParams p;
    p.a = ctx.a();
    p.n0 = ctx.n0_;
    p.N0 = ctx.N0_;
    p.K = ctx.m_;
    p.m = ctx.m_;
    p.q3_form = structure::Q3Form::AtLeastN0PlusM;
    p.stop_at_first = true;
    for (int s = 0; s < 2; ++s) {
        const std::string name = "H" + std::to_string(s + 1);
        try {
            auto q1 = structure::check_q1(*gs[s], p);
            if (!q1.pass) fail(name + ": Q1 fails (clause " + std::to_string(q1.violations.front().clause) + ")");
        } catch (const ResourceLimit& e) {
            fail(name + ": Q1 search exceeded its budget (" + e.what() + ")");
        }
        try {
            auto q2 = structure::check_q2(*gs[s], p);
            if (!q2.pass)
                for (std::size_t b = 3; b < q2.counts.size(); ++b)
                    if (q2.counts[b] < p.K) {
                        fail(name + ": Q2 fails, " + std::to_string(q2.counts[b]) + " cycles of length " +
                             std::to_string(b) + " outside [N0]");
                        break;
                    }
        } catch (const ResourceLimit& e) {
            fail(name + ": Q2 search exceeded its budget (" + e.what() + ")");
        }
        auto q3 = structure::check_q3(*gs[s], p);
        if (!q3.pass) fail(name + ": Q3 fails at vertex " + std::to_string(q3.offending.front()));
    }
    if (out.failures.empty()) {
        for (int s = 0; s < 2; ++s) {
            auto& dst = s == 0 ? ctx.cycles1_ : ctx.cycles2_;
            dst.clear();
            for (auto& c : cycles_up_to(*gs[s], ctx.cycle_limit_))
                if (std::all_of(c.vertices.begin(), c.vertices.end(), [&](Vertex v) { return v > ctx.N0_; }))
                    dst.push_back(std::move(c));
        }
    }
    out.ok = out.failures.empty();
    ctx.validated_ = out.ok;
    ctx.diagnostics_ = out.failures;
    return out;
}

std::string to_string(Tag t) {
    switch (t) {
    case Tag::Case1: return "case1";
    case Tag::Case2: return "case2";
    case Tag::Case3: return "case3";
    default: return "unset";
    }
}

StrategyState initial_state(const MatchContext& ctx) {
    StrategyState st;
    st.pebbles.resize(ctx.pebbles());
    return st;
}

// ---------------------------------------------------------------- engine

namespace {

// Vertices of a ball with their distance from the centre, sorted by vertex.
struct Ball {
    Vertex center = 0;
    std::size_t radius = 0;
    std::vector<Vertex> verts;
    std::vector<std::uint32_t> depth;

    std::size_t find(Vertex v) const {
        auto it = std::lower_bound(verts.begin(), verts.end(), v);
        return it != verts.end() && *it == v ? std::size_t(it - verts.begin()) : kInfinity;
    }
    bool has(Vertex v) const { return find(v) != kInfinity; }
    std::size_t depth_of(Vertex v) const {
        auto i = find(v);
        return i == kInfinity ? kInfinity : depth[i];
    }
    std::size_t max_depth() const {
        return depth.empty() ? 0 : *std::max_element(depth.begin(), depth.end());
    }
};

struct Candidate {
    Vertex y = 0;
    Tag tag = Tag::Unset;
    Vertex anchor = 0;
};

} // namespace

struct Duplicator::Impl {
    const MatchContext& ctx;
    LocalBfs bfs[2];
    LocalBfs aux[2];

    explicit Impl(const MatchContext& c)
        : ctx(c), bfs{LocalBfs(c.h1()), LocalBfs(c.h2())}, aux{LocalBfs(c.h1()), LocalBfs(c.h2())} {}

    const Graph& g(int s) const { return s == 0 ? ctx.h1() : ctx.h2(); }
    std::size_t radius(std::size_t rd) const { return std::size_t{1} << (ctx.R() + 1 - rd); }
    static Vertex pos(const PebbleRecord& p, int s) { return s == 0 ? p.x : p.y; }

    std::size_t dist(int s, Vertex a, Vertex b, std::size_t limit) {
        bfs[s].run(a, limit);
        return bfs[s].dist(b);
    }

    Ball make_ball(int s, Vertex c, std::size_t r) {
        Ball b;
        b.center = c;
        b.radius = r;
        const auto& order = bfs[s].run(c, r);
        b.verts = order;
        std::sort(b.verts.begin(), b.verts.end());
        b.depth.resize(b.verts.size());
        for (std::size_t i = 0; i < b.verts.size(); ++i) b.depth[i] = std::uint32_t(bfs[s].dist(b.verts[i]));
        return b;
    }

    // Edges inside a vertex set minus its size plus one; 0 for a tree.
    long cyclomatic(int s, const std::vector<Vertex>& set) const {
        long e = 0;
        for (Vertex v : set)
            for (Vertex w : g(s).neighbors(v))
                if (w > v && contains_sorted(set, w)) ++e;
        return e - long(set.size()) + 1;
    }

    // Tree on a sorted vertex set rooted at `root`; local ids follow the set.
    canon::RootedTree tree_on(int s, const std::vector<Vertex>& set, Vertex root) const {
        std::vector<int> parent(set.size(), -2);
        auto at = [&](Vertex v) { return int(std::lower_bound(set.begin(), set.end(), v) - set.begin()); };
        std::vector<Vertex> q{root};
        parent[at(root)] = -1;
        for (std::size_t h = 0; h < q.size(); ++h)
            for (Vertex w : g(s).neighbors(q[h])) {
                if (!contains_sorted(set, w)) continue;
                int i = at(w);
                if (parent[i] != -2) continue;
                parent[i] = at(q[h]);
                q.push_back(w);
            }
        return canon::RootedTree::from_parents(std::move(parent));
    }

    std::vector<Vertex> core_ball(Vertex u, std::size_t r) {
        const Vertex N0 = Vertex(ctx.N0());
        auto order = bfs[0].run(u, r, [&](Vertex v) { return v <= N0; });
        std::sort(order.begin(), order.end());
        return order;
    }

    // The unique cycle of a unicyclic vertex set, by peeling leaves.
    std::vector<Vertex> cycle_of(int s, const std::vector<Vertex>& set) const {
        std::vector<std::size_t> deg(set.size(), 0);
        auto at = [&](Vertex v) { return std::size_t(std::lower_bound(set.begin(), set.end(), v) - set.begin()); };
        for (std::size_t i = 0; i < set.size(); ++i)
            for (Vertex w : g(s).neighbors(set[i]))
                if (contains_sorted(set, w)) ++deg[i];
        std::vector<char> gone(set.size(), 0);
        std::vector<std::size_t> stack;
        for (std::size_t i = 0; i < set.size(); ++i)
            if (deg[i] <= 1) stack.push_back(i);
        while (!stack.empty()) {
            auto i = stack.back();
            stack.pop_back();
            if (gone[i]) continue;
            gone[i] = 1;
            for (Vertex w : g(s).neighbors(set[i])) {
                if (!contains_sorted(set, w)) continue;
                auto j = at(w);
                if (!gone[j] && --deg[j] <= 1) stack.push_back(j);
            }
        }
        std::vector<Vertex> out;
        for (std::size_t i = 0; i < set.size(); ++i)
            if (!gone[i]) out.push_back(set[i]);
        return out;
    }

    // Ball vertices on a shortest path from the centre to the nearest target.
    void add_interval(int s, const Ball& b, const std::vector<Vertex>& targets, std::vector<Vertex>& out) {
        std::size_t dt = kInfinity;
        for (Vertex t : targets) dt = std::min(dt, b.depth_of(t));
        if (dt == kInfinity) return;
        aux[s].run(std::span<const Vertex>(targets), dt);
        for (std::size_t i = 0; i < b.verts.size(); ++i) {
            auto d = aux[s].dist(b.verts[i]);
            if (d != kInfinity && b.depth[i] + d == dt) out.push_back(b.verts[i]);
        }
    }

    // Structure-preserving map between two skeletons: adjacency, depth in
    // the ball and core membership are kept, fixed pairs are honoured and
    // (when core_identity) core vertices map to themselves.
    bool skeleton_iso(const Ball* b, std::vector<Vertex> S[2], const std::vector<std::pair<Vertex, Vertex>>& fixed,
                      bool core_identity, int sa, std::vector<std::pair<Vertex, Vertex>>* result) {
        const int sb = 1 - sa;
        for (int s = 0; s < 2; ++s) {
            std::sort(S[s].begin(), S[s].end());
            S[s].erase(std::unique(S[s].begin(), S[s].end()), S[s].end());
        }
        if (S[0].size() != S[1].size()) return false;
        const auto& A = S[sa];
        const auto& B = S[sb];
        const Ball& ba = b[sa];
        const Ball& bb = b[sb];
        const Vertex N0 = Vertex(ctx.N0());
        std::vector<Vertex> order = A;
        std::stable_sort(order.begin(), order.end(),
                         [&](Vertex u, Vertex v) { return ba.depth_of(u) < ba.depth_of(v); });
        std::vector<Vertex> image(order.size(), 0);
        std::vector<char> used(B.size(), 0);
        auto idxB = [&](Vertex v) {
            auto it = std::lower_bound(B.begin(), B.end(), v);
            return it != B.end() && *it == v ? std::size_t(it - B.begin()) : kInfinity;
        };
        auto forced = [&](Vertex w) -> Vertex {
            for (auto& [p, q] : fixed)
                if (p == w) return q;
            if (core_identity && w <= N0) return w;
            return 0;
        };
        std::size_t steps = 0;
        std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
            if (++steps > 200000) return false;
            if (k == order.size()) return true;
            Vertex w = order[k];
            std::size_t dw = ba.depth_of(w);
            auto admissible = [&](Vertex c) {
                auto i = idxB(c);
                if (i == kInfinity || used[i]) return false;
                if (bb.depth_of(c) != dw) return false;
                if (core_identity && ((w <= N0) != (c <= N0))) return false;
                for (std::size_t j = 0; j < k; ++j)
                    if (g(sa).adjacent(w, order[j]) != g(sb).adjacent(c, image[j])) return false;
                return true;
            };
            auto take = [&](Vertex c) {
                auto i = idxB(c);
                used[i] = 1;
                image[k] = c;
                if (go(k + 1)) return true;
                used[i] = 0;
                return false;
            };
            Vertex f = forced(w);
            if (f != 0) return admissible(f) && take(f);
            // candidates: neighbours of an already mapped neighbour, else all
            std::size_t anchor = kInfinity;
            for (std::size_t j = 0; j < k && anchor == kInfinity; ++j)
                if (g(sa).adjacent(w, order[j])) anchor = j;
            if (anchor != kInfinity) {
                for (Vertex c : g(sb).neighbors(image[anchor]))
                    if (!forced_target(c, fixed, core_identity, N0) && admissible(c) && take(c)) return true;
                return false;
            }
            for (Vertex c : B)
                if (!forced_target(c, fixed, core_identity, N0) && admissible(c) && take(c)) return true;
            return false;
        };
        if (!go(0)) return false;
        if (result) {
            result->clear();
            for (std::size_t k = 0; k < order.size(); ++k) result->push_back({order[k], image[k]});
            std::sort(result->begin(), result->end());
        }
        return true;
    }

    // A vertex reserved as the image of a fixed point.
    static bool forced_target(Vertex c, const std::vector<std::pair<Vertex, Vertex>>& fixed, bool core_identity,
                              Vertex N0) {
        for (auto& pq : fixed)
            if (pq.second == c) return true;
        return core_identity && c <= N0;
    }

    // ---------------------------------------------------------- checks

    struct Decomposition {
        std::string error;
        std::vector<Vertex> tree;                   // T, sorted
        std::vector<std::vector<Vertex>> forest;    // one F tree per V vertex other than u
        std::vector<Vertex> forest_roots;
    };

    // Splits ball(c) into T, H|V and F. Every component of ball - V must be
    // a tree joined to V by exactly one edge.
    Decomposition decompose(int s, const Ball& b, Vertex c, Vertex u, const std::vector<Vertex>& V) {
        Decomposition d;
        for (Vertex v : V)
            if (!b.has(v)) {
                d.error = "V vertex " + std::to_string(v) + " outside the ball";
                return d;
            }
        if (contains_sorted(V, c)) {
            d.error = "pebble lies in V";
            return d;
        }
        std::vector<int> comp(b.verts.size(), -1);
        std::vector<Vertex> attach;
        std::vector<std::vector<Vertex>> members;
        for (std::size_t i = 0; i < b.verts.size(); ++i) {
            if (comp[i] != -1 || contains_sorted(V, b.verts[i])) continue;
            int id = int(members.size());
            std::size_t inner = 0, outer = 0;
            Vertex at = 0;
            std::vector<Vertex> q{b.verts[i]};
            comp[i] = id;
            for (std::size_t h = 0; h < q.size(); ++h) {
                for (Vertex w : g(s).neighbors(q[h])) {
                    auto j = b.find(w);
                    if (j == kInfinity) continue;
                    if (contains_sorted(V, w)) {
                        ++outer;
                        at = w;
                        continue;
                    }
                    ++inner;
                    if (comp[j] == -1) {
                        comp[j] = id;
                        q.push_back(w);
                    }
                }
            }
            if (inner / 2 + 1 != q.size()) {
                d.error = "a component of the ball outside V is not a tree";
                return d;
            }
            if (outer != 1) {
                d.error = "a component of the ball outside V meets V in " + std::to_string(outer) + " edges";
                return d;
            }
            attach.push_back(at);
            members.push_back(std::move(q));
        }
        int cc = comp[b.find(c)];
        if (attach[cc] != u) {
            d.error = "the pebble's component is not attached to the anchor";
            return d;
        }
        d.tree.push_back(u);
        for (std::size_t k = 0; k < members.size(); ++k)
            if (attach[k] == u) d.tree.insert(d.tree.end(), members[k].begin(), members[k].end());
        std::sort(d.tree.begin(), d.tree.end());
        for (Vertex v : V) {
            if (v == u) continue;
            std::vector<Vertex> f{v};
            for (std::size_t k = 0; k < members.size(); ++k)
                if (attach[k] == v) f.insert(f.end(), members[k].begin(), members[k].end());
            std::sort(f.begin(), f.end());
            d.forest.push_back(std::move(f));
            d.forest_roots.push_back(v);
        }
        return d;
    }

    // Problems with pebble i of st relative to the pebbles placed before it.
    void check_pebble(const StrategyState& st, std::size_t i, std::vector<std::string>& out) {
        const auto& p = st.pebbles[i];
        auto say = [&](const std::string& msg) {
            out.push_back("pebble " + std::to_string(i + 1) + " (round " + std::to_string(p.rd) + ", " +
                          to_string(p.tag) + "): " + msg);
        };
        if (p.rd < 1 || p.rd > ctx.R()) {
            say("round out of range");
            return;
        }
        if (!ctx.h1().contains(p.x) || !ctx.h2().contains(p.y)) {
            say("vertex out of range");
            return;
        }
        const std::size_t rho = radius(p.rd);
        std::vector<std::size_t> older;
        for (std::size_t j = 0; j < st.pebbles.size(); ++j)
            if (j != i && st.pebbles[j].placed && st.pebbles[j].rd < p.rd) older.push_back(j);
        std::vector<std::pair<Vertex, Vertex>> near;  // older pebbles within rho
        for (auto j : older) {
            const auto& q = st.pebbles[j];
            auto dx = dist(0, p.x, q.x, rho);
            auto dy = dist(1, p.y, q.y, rho);
            if (dx != dy)
                say("distance dichotomy fails against pebble " + std::to_string(j + 1) + " (" +
                    (dx == kInfinity ? std::string(">r") : std::to_string(dx)) + " vs " +
                    (dy == kInfinity ? std::string(">r") : std::to_string(dy)) + ")");
            else if (dx != kInfinity)
                near.push_back({q.x, q.y});
        }
        switch (p.tag) {
        case Tag::Case1:
            if (p.x != p.y) say("core pebble with x != y");
            else if (p.x > ctx.N0()) say("core pebble outside [N0]");
            else if (ctx.core_distance(p.x) > rho) say("core pebble farther than the radius from [n0] inside [N0]");
            break;
        case Tag::Case2: check_far(p, rho, near, say); break;
        case Tag::Case3: check_anchored(p, rho, near, say); break;
        default: say("placed pebble without a tag");
        }
    }

    template <class Say>
    void check_far(const PebbleRecord& p, std::size_t rho, const std::vector<std::pair<Vertex, Vertex>>& near,
                   Say& say) {
        Ball b[2];
        long cyc[2];
        for (int s = 0; s < 2; ++s) {
            Vertex c = pos(p, s);
            if (ctx.base_distance(side_of(s), c) <= rho) {
                say("ball in H" + std::to_string(s + 1) + " meets [n0]");
                return;
            }
            b[s] = make_ball(s, c, rho);
            cyc[s] = cyclomatic(s, b[s].verts);
            if (b[s].max_depth() != rho) {
                say("ball in H" + std::to_string(s + 1) + " ends before the radius");
                return;
            }
        }
        if (cyc[0] > 1 || cyc[1] > 1) {
            say("ball with more than one cycle");
            return;
        }
        if (cyc[0] != cyc[1]) {
            say("one ball is a tree and the other is unicyclic");
            return;
        }
        std::vector<Vertex> S[2];
        if (cyc[0] == 0) {
            for (int s = 0; s < 2; ++s)
                if (!canon::a_trivial(tree_on(s, b[s].verts, pos(p, s)), ctx.m() - 1))
                    say("ball in H" + std::to_string(s + 1) + " is not an (m-1)-trivial tree");
        } else {
            canon::RootedUnicyclic u[2];
            for (int s = 0; s < 2; ++s) {
                auto sub = induced_subgraph(g(s), b[s].verts);
                u[s] = canon::RootedUnicyclic(sub.graph, sub.local(pos(p, s)));
                auto cyc_v = cycle_of(s, b[s].verts);
                S[s] = cyc_v;
                add_interval(s, b[s], cyc_v, S[s]);
            }
            if (!canon::unicyclic_a_isomorphic(u[0], u[1], ctx.m() - 2))
                say("unicyclic balls are not (m-2)-isomorphic");
        }
        skeleton_check(b, S, p, near, say);
    }

    template <class Say>
    void skeleton_check(const Ball* b, std::vector<Vertex>* S, const PebbleRecord& p,
                        const std::vector<std::pair<Vertex, Vertex>>& near, Say& say,
                        const std::vector<Vertex>& extra_targets = {}) {
        std::vector<std::pair<Vertex, Vertex>> fixed{{p.x, p.y}};
        fixed.insert(fixed.end(), near.begin(), near.end());
        for (int s = 0; s < 2; ++s) {
            S[s].push_back(pos(p, s));
            for (auto& [x, y] : near) add_interval(s, b[s], {s == 0 ? x : y}, S[s]);
            if (!extra_targets.empty()) add_interval(s, b[s], extra_targets, S[s]);
        }
        if (!skeleton_iso(b, S, fixed, true, 0, nullptr))
            say("no isomorphism of the pebble skeletons");
    }

    template <class Say>
    void check_anchored(const PebbleRecord& p, std::size_t rho, const std::vector<std::pair<Vertex, Vertex>>& near,
                        Say& say) {
        const Vertex u = p.anchor;
        if (u < 1 || u > ctx.N0()) {
            say("anchor outside [N0]");
            return;
        }
        auto d0 = dist(0, p.x, u, rho);
        auto d1 = dist(1, p.y, u, rho);
        if (d0 == kInfinity || d0 != d1 || d0 == 0) {
            say("anchor distances differ or vanish");
            return;
        }
        auto V = core_ball(u, rho - d0);
        if (V != p.core_set) say("v in V iff d_{H|[N0]}(v,u) <= r - d(x,u) fails");
        Ball b[2];
        std::vector<Vertex> S[2];
        std::size_t tdist[2];
        for (int s = 0; s < 2; ++s) {
            Vertex c = pos(p, s);
            b[s] = make_ball(s, c, rho);
            auto d = decompose(s, b[s], c, u, V);
            if (!d.error.empty()) {
                say("H" + std::to_string(s + 1) + ": " + d.error);
                return;
            }
            auto t = tree_on(s, d.tree, c);
            if (t.depth() != rho || !canon::a_trivial(t, ctx.m() - 1))
                say("H" + std::to_string(s + 1) + ": T is not an (m-1)-trivial tree of full depth");
            tdist[s] = t.level(int(std::lower_bound(d.tree.begin(), d.tree.end(), u) - d.tree.begin()));
            for (std::size_t k = 0; k < d.forest.size(); ++k)
                if (!canon::a_trivial(tree_on(s, d.forest[k], d.forest_roots[k]), ctx.m() - 1)) {
                    say("H" + std::to_string(s + 1) + ": F tree at " + std::to_string(d.forest_roots[k]) +
                        " is not (m-1)-trivial");
                    break;
                }
            S[s] = V;
        }
        if (tdist[0] != tdist[1]) say("tree distances to the anchor differ");
        skeleton_check(b, S, p, near, say, {u});
    }

    // ---------------------------------------------------------- replies

    // Last core vertex on the canonical shortest path from [n0] to x, and
    // the distance from it to x.
    std::pair<Vertex, std::size_t> exit_anchor(int s, Vertex x) {
        Side sd = side_of(s);
        std::vector<Vertex> path{x};
        Vertex cur = x;
        while (ctx.base_distance(sd, cur) > 0) {
            auto dc = ctx.base_distance(sd, cur);
            for (Vertex w : g(s).neighbors(cur))
                if (ctx.base_distance(sd, w) + 1 == dc) {
                    cur = w;
                    break;
                }
            path.push_back(cur);
        }
        std::reverse(path.begin(), path.end());
        std::size_t k = 0;
        while (k + 1 < path.size() && path[k + 1] <= ctx.N0()) ++k;
        return {path[k], path.size() - 1 - k};
    }

    // Same along the canonical shortest path from `from` to x.
    std::pair<Vertex, std::size_t> exit_between(int s, Vertex from, Vertex x, std::size_t limit) {
        aux[s].run(x, limit);
        std::vector<Vertex> path{from};
        Vertex cur = from;
        while (cur != x) {
            auto dc = aux[s].dist(cur);
            for (Vertex w : g(s).neighbors(cur))
                if (aux[s].dist(w) + 1 == dc) {
                    cur = w;
                    break;
                }
            path.push_back(cur);
        }
        std::size_t k = 0;
        if (path[0] > ctx.N0()) return {0, 0};
        while (k + 1 < path.size() && path[k + 1] <= ctx.N0()) ++k;
        return {path[k], path.size() - 1 - k};
    }

    static constexpr std::size_t kStageCap = 4000;

    // Fresh branches hanging off u at depth delta, skipping first steps
    // already used by anchored pebbles with the same anchor.
    void anchored_candidates(const StrategyState& st, int sb, Vertex u, std::size_t delta, std::size_t rho,
                             std::vector<Candidate>& out) {
        if (delta == 0 || delta > rho) return;
        const Vertex N0 = Vertex(ctx.N0());
        std::vector<Vertex> excluded;
        for (const auto& q : st.pebbles) {
            if (!q.placed || q.tag != Tag::Case3 || q.anchor != u) continue;
            Vertex yq = pos(q, sb);
            aux[sb].run(yq, radius(q.rd));
            auto dq = aux[sb].dist(u);
            for (Vertex v : g(sb).neighbors(u))
                if (v > N0 && dq != kInfinity && aux[sb].dist(v) + 1 == dq) excluded.push_back(v);
        }
        std::size_t added = 0;
        for (Vertex v : g(sb).neighbors(u)) {
            if (v <= N0 || std::find(excluded.begin(), excluded.end(), v) != excluded.end()) continue;
            auto order = bfs[sb].run(v, delta - 1, [&](Vertex w) { return w > N0 && w != u; });
            std::vector<Vertex> ends;
            for (Vertex w : order)
                if (bfs[sb].dist(w) == delta - 1) ends.push_back(w);
            std::sort(ends.begin(), ends.end());
            for (Vertex y : ends) {
                out.push_back({y, Tag::Case3, u});
                if (++added >= kStageCap) return;
            }
        }
    }

    // Replies far from every pebble: a matching cycle neighbourhood, or the
    // far end of a fresh path leaving [n0].
    void fresh_far_candidates(int sa, int sb, Vertex x, std::size_t rho, std::vector<Candidate>& out) {
        Ball ba = make_ball(sa, x, rho);
        long cyc = cyclomatic(sa, ba.verts);
        std::size_t added = 0;
        if (cyc == 1) {
            auto c = cycle_of(sa, ba.verts);
            std::size_t dc = kInfinity;
            for (Vertex v : c) dc = std::min(dc, ba.depth_of(v));
            for (const auto& cy : ctx.outer_cycles(side_of(sb))) {
                if (cy.length() != c.size()) continue;
                const auto& order = bfs[sb].run(std::span<const Vertex>(cy.vertices), dc);
                std::vector<Vertex> ends;
                for (Vertex w : order)
                    if (bfs[sb].dist(w) == dc) ends.push_back(w);
                std::sort(ends.begin(), ends.end());
                for (Vertex y : ends) {
                    out.push_back({y, Tag::Case2, 0});
                    if (++added >= kStageCap) return;
                }
            }
            return;
        }
        const Vertex n0 = Vertex(ctx.n0());
        const Vertex N0 = Vertex(ctx.N0());
        for (Vertex u = 1; u <= n0; ++u)
            for (Vertex v : g(sb).neighbors(u)) {
                if (v <= N0) continue;
                const auto& order = bfs[sb].run(v, rho, [&](Vertex w) { return w > n0; });
                std::vector<Vertex> ends;
                for (Vertex w : order)
                    if (bfs[sb].dist(w) == rho && ctx.base_distance(side_of(sb), w) == rho + 1) ends.push_back(w);
                std::sort(ends.begin(), ends.end());
                for (Vertex y : ends) {
                    out.push_back({y, Tag::Case2, 0});
                    if (++added >= kStageCap) return;
                }
            }
    }

    // Copies x across the stored correspondence of pebble j: map the part
    // of j's ball spanned by the nearby pebbles, then leave the skeleton
    // along a fresh branch of the same length and depth.
    void mirror_candidates(const StrategyState& st, std::size_t j, const std::vector<std::size_t>& nearby, int sa,
                           Vertex x, Tag tag, Vertex anchor, std::vector<Candidate>& out) {
        const int sb = 1 - sa;
        const auto& pj = st.pebbles[j];
        const std::size_t rj = radius(pj.rd);
        Ball b[2];
        std::vector<Vertex> S[2];
        for (int s = 0; s < 2; ++s) b[s] = make_ball(s, pos(pj, s), rj);
        std::vector<std::pair<Vertex, Vertex>> fixed;  // (sa vertex, sb vertex)
        auto add_fixed = [&](const PebbleRecord& q) {
            if (!b[sa].has(pos(q, sa)) || !b[sb].has(pos(q, sb))) return;
            fixed.push_back({pos(q, sa), pos(q, sb)});
            for (int s = 0; s < 2; ++s) {
                S[s].push_back(pos(q, s));
                add_interval(s, b[s], {pos(q, s)}, S[s]);
            }
        };
        add_fixed(pj);
        for (auto i : nearby) add_fixed(st.pebbles[i]);
        for (int s = 0; s < 2; ++s) {
            if (pj.tag == Tag::Case3) {
                S[s].insert(S[s].end(), pj.core_set.begin(), pj.core_set.end());
                add_interval(s, b[s], {pj.anchor}, S[s]);
            } else if (pj.tag == Tag::Case2 && cyclomatic(s, b[s].verts) == 1) {
                auto c = cycle_of(s, b[s].verts);
                S[s].insert(S[s].end(), c.begin(), c.end());
                add_interval(s, b[s], c, S[s]);
            }
        }
        std::vector<std::pair<Vertex, Vertex>> f;
        if (!skeleton_iso(b, S, fixed, true, sa, &f)) return;
        auto image = [&](Vertex v) -> Vertex {
            auto it = std::lower_bound(f.begin(), f.end(), std::pair<Vertex, Vertex>{v, 0});
            return it != f.end() && it->first == v ? it->second : 0;
        };
        if (Vertex y = image(x)) {
            out.push_back({y, tag, anchor});
            return;
        }
        if (!b[sa].has(x)) return;
        const auto& SA = S[sa];
        const auto& SB = S[sb];
        const auto& order = bfs[sa].run(x, rj, [&](Vertex w) { return b[sa].has(w); });
        std::size_t dd = kInfinity;
        std::vector<Vertex> closest;
        for (Vertex w : order) {
            auto d = bfs[sa].dist(w);
            if (d > dd) break;
            if (contains_sorted(SA, w)) {
                dd = d;
                closest.push_back(w);
            }
        }
        std::sort(closest.begin(), closest.end());
        const std::size_t want_depth = b[sa].depth_of(x);
        std::size_t added = 0;
        for (Vertex v1 : closest) {
            Vertex v2 = image(v1);
            if (v2 == 0) continue;
            const auto& ob = bfs[sb].run(v2, dd, [&](Vertex w) {
                return w == v2 || (b[sb].has(w) && !contains_sorted(SB, w));
            });
            std::vector<Vertex> ends;
            for (Vertex w : ob)
                if (bfs[sb].dist(w) == dd && b[sb].depth_of(w) == want_depth) ends.push_back(w);
            std::sort(ends.begin(), ends.end());
            for (Vertex y : ends) {
                out.push_back({y, tag, anchor});
                if (++added >= kStageCap) return;
            }
        }
    }

    PebbleRecord make_record(int sa, Vertex x, const Candidate& c, std::size_t rd) {
        PebbleRecord r;
        r.placed = true;
        r.x = sa == 0 ? x : c.y;
        r.y = sa == 0 ? c.y : x;
        r.tag = c.tag;
        r.rd = rd;
        if (c.tag == Tag::Case3) {
            r.anchor = c.anchor;
            const std::size_t rho = radius(rd);
            auto d = dist(sa, x, c.anchor, rho);
            if (d != kInfinity && d > 0) r.core_set = core_ball(c.anchor, rho - d);
        }
        return r;
    }

    Vertex respond(StrategyState& st, std::size_t k, Vertex x, Side side) {
        if (!ctx.validated()) throw DomainError("strategy: context has not been validated");
        if (k >= st.pebbles.size()) throw DomainError("strategy: pebble index out of range");
        if (st.round >= ctx.R()) throw DomainError("strategy: all rounds have been played");
        ctx.graph(side).check_vertex(x);
        const std::size_t t = st.round + 1;
        const std::size_t rho = radius(t);
        const int sa = index_of(side), sb = 1 - sa;

        StrategyState trial = st;
        trial.pebbles[k] = PebbleRecord{};
        std::vector<std::size_t> J[4];  // by tag; J[0] collects all
        for (std::size_t i = 0; i < trial.pebbles.size(); ++i) {
            const auto& q = trial.pebbles[i];
            if (!q.placed || dist(sa, x, pos(q, sa), rho) == kInfinity) continue;
            J[0].push_back(i);
            J[int(q.tag)].push_back(i);
        }
        auto latest = [&](std::initializer_list<int> tags) {
            std::size_t best = kInfinity;
            for (int tg : tags)
                for (auto i : J[tg])
                    if (best == kInfinity || trial.pebbles[i].rd > trial.pebbles[best].rd) best = i;
            return best;
        };

        std::vector<std::function<void(std::vector<Candidate>&)>> stages;
        std::string which;
        const std::size_t dA = ctx.base_distance(side, x);
        if (x <= ctx.N0() && ctx.core_distance(x) <= rho) {
            which = "near core, inside";
            stages.push_back([&](auto& out) { out.push_back({x, Tag::Case1, 0}); });
        } else if (dA <= rho) {
            which = "near core, escaping";
            auto ex = exit_anchor(sa, x);
            Vertex u = ex.first;
            std::size_t delta = ex.second;
            std::size_t j = latest({int(Tag::Case3)});
            if (j != kInfinity)
                stages.push_back([&, j, u](auto& out) {
                    mirror_candidates(trial, j, J[0], sa, x, Tag::Case3, u, out);
                });
            stages.push_back([&, u, delta](auto& out) { anchored_candidates(trial, sb, u, delta, rho, out); });
        } else if (J[0].empty()) {
            which = "far, alone";
            stages.push_back([&](auto& out) { fresh_far_candidates(sa, sb, x, rho, out); });
        } else if (J[int(Tag::Case2)].empty() && J[int(Tag::Case3)].empty()) {
            which = "far, near core pebbles";
            for (auto j : J[int(Tag::Case1)]) {
                Vertex xj = pos(trial.pebbles[j], sa);
                if (x > ctx.N0()) break;
                bfs[0].run(xj, rho, [&](Vertex v) { return v <= ctx.N0(); });
                auto dn = bfs[0].dist(x);
                if (dn != kInfinity && dn == dist(sa, xj, x, rho)) {
                    stages.push_back([&](auto& out) { out.push_back({x, Tag::Case2, 0}); });
                    break;
                }
            }
            for (auto j : J[int(Tag::Case1)]) {
                auto ex = exit_between(sa, pos(trial.pebbles[j], sa), x, rho);
                Vertex u = ex.first;
                std::size_t delta = ex.second;
                if (u != 0)
                    stages.push_back(
                        [&, u, delta](auto& out) { anchored_candidates(trial, sb, u, delta, rho, out); });
            }
            stages.push_back([&](auto& out) { fresh_far_candidates(sa, sb, x, rho, out); });
        } else {
            which = "far, near far or anchored pebbles";
            std::size_t j = latest({int(Tag::Case2), int(Tag::Case3)});
            stages.push_back([&, j](auto& out) { mirror_candidates(trial, j, J[0], sa, x, Tag::Case2, 0, out); });
            stages.push_back([&](auto& out) { fresh_far_candidates(sa, sb, x, rho, out); });
        }

        std::size_t tried = 0;
        std::string first_rejection;
        std::vector<std::tuple<Vertex, int, Vertex>> seen;
        for (auto& stage : stages) {
            std::vector<Candidate> cands;
            trial.pebbles[k] = PebbleRecord{};
            stage(cands);
            for (const auto& c : cands) {
                std::tuple<Vertex, int, Vertex> key{c.y, int(c.tag), c.anchor};
                if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
                seen.push_back(key);
                ++tried;
                trial.pebbles[k] = make_record(sa, x, c, t);
                std::vector<std::string> problems;
                check_pebble(trial, k, problems);
                if (problems.empty()) {
                    trial.round = t;
                    st = std::move(trial);
                    return c.y;
                }
                if (first_rejection.empty()) first_rejection = problems.front();
            }
        }
        std::ostringstream msg;
        msg << "no admissible reply in round " << t << " to pebble " << (k + 1) << " on vertex " << x << " in "
            << game::side_char(side) << " (" << which << "; " << tried << " candidates";
        if (!first_rejection.empty()) msg << "; first rejection: " << first_rejection;
        msg << ")";
        throw ExhaustionError(msg.str());
    }

    std::vector<std::string> self_check(const StrategyState& st) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < st.pebbles.size(); ++i) {
            const auto& p = st.pebbles[i];
            if (!p.placed) continue;
            if (p.rd > st.round) out.push_back("pebble " + std::to_string(i + 1) + ": round after the current one");
            check_pebble(st, i, out);
        }
        return out;
    }
};

Duplicator::Duplicator(const MatchContext& ctx) : ctx_(ctx), impl_(std::make_unique<Impl>(ctx)) {}
Duplicator::~Duplicator() = default;

Vertex Duplicator::first_move(StrategyState& st, Vertex x, Side side, std::size_t pebble) {
    if (st.round != 0) throw DomainError("strategy: first_move after the first round");
    return impl_->respond(st, pebble, x, side);
}

Vertex Duplicator::respond(StrategyState& st, std::size_t pebble, Vertex x, Side side) {
    return impl_->respond(st, pebble, x, side);
}

std::vector<std::string> Duplicator::self_check(const StrategyState& st) { return impl_->self_check(st); }

Vertex first_move(const MatchContext& ctx, StrategyState& st, Vertex x, Side side) {
    Duplicator d(ctx);
    return d.first_move(st, x, side);
}

Vertex respond(const MatchContext& ctx, StrategyState& st, std::size_t pebble, Vertex x, Side side) {
    Duplicator d(ctx);
    return d.respond(st, pebble, x, side);
}

std::vector<std::string> self_check(const MatchContext& ctx, const StrategyState& st) {
    Duplicator d(ctx);
    return d.self_check(st);
}

// ---------------------------------------------------------------- matches

namespace {

game::GameConfig config_of(const StrategyState& st, std::size_t rounds_left) {
    game::GameConfig cfg = game::GameConfig::empty(st.pebbles.size(), rounds_left);
    for (std::size_t i = 0; i < st.pebbles.size(); ++i)
        if (st.pebbles[i].placed) cfg.pebbles[i] = {st.pebbles[i].x, st.pebbles[i].y};
    return cfg;
}

// Plays one Spoiler move; false when Duplicator lost or an invariant broke.
bool play_move(Duplicator& dup, StrategyState& st, const game::SpoilerMove& mv, RoundRecord& rec,
               std::string& error) {
    const auto& ctx = dup.context();
    rec.round = st.round + 1;
    rec.move = mv;
    try {
        rec.reply = dup.respond(st, mv.pebble, mv.vertex, mv.side);
    } catch (const ExhaustionError& e) {
        error = e.what();
        rec.partial_iso = false;
        return false;
    }
    rec.partial_iso = game::partial_iso(config_of(st, ctx.R() - st.round), ctx.h1(), ctx.h2());
    rec.problems = dup.self_check(st);
    return rec.partial_iso && rec.problems.empty();
}

} // namespace

std::string DuelResult::transcript() const {
    std::ostringstream os;
    for (const auto& r : rounds) {
        os << r.round << ' ' << game::side_char(r.move.side) << ' ' << (r.move.pebble + 1) << ' ' << r.move.vertex
           << '\n';
        if (r.reply != 0)
            os << r.round << ' ' << game::side_char(game::other(r.move.side)) << ' ' << (r.move.pebble + 1) << ' '
               << r.reply << '\n';
        if (r.problems.empty() && r.partial_iso)
            os << "# round " << r.round << " self-check ok\n";
        for (const auto& p : r.problems) os << "# round " << r.round << " " << p << '\n';
        if (!r.partial_iso && r.reply != 0) os << "# round " << r.round << " not a partial isomorphism\n";
    }
    if (!error.empty()) os << "# error: " << error << '\n';
    os << "winner " << (duplicator_won ? "duplicator" : "spoiler") << '\n';
    return os.str();
}

DuelResult duel(Duplicator& dup, SpoilerPolicy& spoiler, std::size_t rounds) {
    const auto& ctx = dup.context();
    if (rounds > ctx.R()) throw DomainError("duel: more rounds than the context allows");
    DuelResult res;
    StrategyState st = initial_state(ctx);
    for (std::size_t r = 0; r < rounds; ++r) {
        auto mv = spoiler.next(ctx, st);
        if (!mv) break;
        if (mv->pebble >= st.pebbles.size() || !ctx.graph(mv->side).contains(mv->vertex))
            throw DomainError("duel: illegal Spoiler move");
        RoundRecord rec;
        bool ok = play_move(dup, st, *mv, rec, res.error);
        res.rounds.push_back(std::move(rec));
        if (!ok) {
            res.duplicator_won = false;
            break;
        }
    }
    return res;
}

ExhaustiveResult exhaustive_spoiler(Duplicator& dup, std::size_t rounds, std::uint64_t budget) {
    const auto& ctx = dup.context();
    if (rounds > ctx.R()) throw DomainError("exhaustive: more rounds than the context allows");
    ExhaustiveResult res;
    std::vector<RoundRecord> path;
    std::function<bool(const StrategyState&, std::size_t)> go = [&](const StrategyState& st, std::size_t left) {
        if (left == 0) return true;
        for (std::size_t k = 0; k < st.pebbles.size(); ++k)
            for (Side side : {Side::G, Side::H}) {
                const Vertex n = Vertex(ctx.graph(side).order());
                for (Vertex v = 1; v <= n; ++v) {
                    if (++res.positions > budget) throw ResourceLimit("exhaustive Spoiler search exceeded its budget");
                    StrategyState next = st;
                    RoundRecord rec;
                    bool ok = play_move(dup, next, {side, k, v}, rec, res.error);
                    path.push_back(rec);
                    if (!ok || !go(next, left - 1)) {
                        if (res.counterexample.empty()) res.counterexample = path;
                        return false;
                    }
                    path.pop_back();
                }
            }
        return true;
    };
    res.duplicator_won = go(initial_state(ctx), rounds);
    return res;
}

std::optional<game::SpoilerMove> RandomSpoiler::next(const MatchContext& ctx, const StrategyState& st) {
    game::SpoilerMove mv;
    mv.pebble = std::size_t(rng_.below(st.pebbles.size()));
    mv.side = rng_.below(2) == 0 ? Side::G : Side::H;
    mv.vertex = Vertex(1 + rng_.below(ctx.graph(mv.side).order()));
    return mv;
}

std::optional<game::SpoilerMove> AdversarialSpoiler::next(const MatchContext& ctx, const StrategyState& st) {
    game::SpoilerMove mv;
    mv.pebble = std::size_t(rng_.below(st.pebbles.size()));
    mv.side = rng_.below(2) == 0 ? Side::G : Side::H;
    const Graph& g = ctx.graph(mv.side);
    const std::size_t t = st.round + 1;
    const std::size_t rho = std::size_t{1} << (ctx.R() + 1 - t);
    // seeds: other pebbles, [n0], and a few short cycles
    std::vector<Vertex> seeds;
    for (std::size_t i = 0; i < st.pebbles.size(); ++i)
        if (i != mv.pebble && st.pebbles[i].placed)
            seeds.push_back(mv.side == Side::G ? st.pebbles[i].x : st.pebbles[i].y);
    const auto& cyc = ctx.outer_cycles(mv.side);
    auto pick_seed = [&]() -> Vertex {
        auto r = rng_.below(4);
        if (r == 0 && !seeds.empty()) return seeds[rng_.below(seeds.size())];
        if (r == 1 && !cyc.empty()) {
            const auto& c = cyc[rng_.below(cyc.size())];
            return c.vertices[rng_.below(c.length())];
        }
        if (r == 2 || cyc.empty()) return Vertex(1 + rng_.below(ctx.N0()));
        return Vertex(1 + rng_.below(ctx.n0()));
    };
    if (rng_.below(10) == 0) {
        mv.vertex = Vertex(1 + rng_.below(g.order()));
        return mv;
    }
    // random walk from a seed to a distance near a threshold of the case analysis
    Vertex v = pick_seed();
    const std::size_t targets[] = {0, 1, rho - 1, rho, rho + 1, 2 * rho, 2 * rho + 1};
    std::size_t steps = targets[rng_.below(std::size(targets))];
    for (std::size_t s = 0; s < steps; ++s) {
        auto nb = g.neighbors(v);
        if (nb.empty()) break;
        v = nb[rng_.below(nb.size())];
    }
    mv.vertex = v;
    return mv;
}

std::optional<game::SpoilerMove> StreamSpoiler::next(const MatchContext& ctx, const StrategyState& st) {
    for (;;) {
        out_ << "round " << (st.round + 1) << " spoiler (pebble side vertex)> " << std::flush;
        std::string line;
        if (!std::getline(in_, line)) return std::nullopt;
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "quit") return std::nullopt;
        std::size_t peb = 0;
        char sc = 0;
        long long v = 0;
        try {
            peb = std::stoul(word);
        } catch (...) {
            out_ << "expected: pebble side vertex\n";
            continue;
        }
        if (!(ls >> sc >> v) || peb < 1 || peb > st.pebbles.size() || (sc != 'G' && sc != 'H')) {
            out_ << "expected: pebble (1.." << st.pebbles.size() << ") side (G|H) vertex\n";
            continue;
        }
        Side side = sc == 'G' ? Side::G : Side::H;
        if (v < 1 || std::size_t(v) > ctx.graph(side).order()) {
            out_ << "vertex out of range\n";
            continue;
        }
        return game::SpoilerMove{side, peb - 1, Vertex(v)};
    }
}

} // namespace uag::strategy
