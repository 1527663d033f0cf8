#include <doctest.h>

#include <filesystem>

#include "uag/canonical.hpp"
#include "uag/error.hpp"
#include "uag/pebble_game.hpp"
#include "uag/strategy.hpp"

using namespace uag;
using namespace uag::strategy;
using game::Side;

namespace {

// R = 1: a few hundred vertices.
const MatchContext& small_ctx() {
    static const MatchContext ctx = [] {
        SyntheticSpec s;
        s.R = 1;
        s.m = 4;
        s.n0 = 1;
        s.N0 = 2;
        s.seed = 5;
        return synthetic_context(s);
    }();
    return ctx;
}

// R = 2: planted cycles of length 3..9, a core path of four vertices.
const MatchContext& medium_ctx() {
    static const MatchContext ctx = [] {
        SyntheticSpec s;
        s.R = 2;
        s.m = 4;
        s.n0 = 2;
        s.N0 = 4;
        s.seed = 3;
        return synthetic_context(s);
    }();
    return ctx;
}

std::size_t dist(const Graph& g, Vertex a, Vertex b) { return distance(g, a, b); }

bool acyclic_ball(const Graph& g, Vertex v, std::size_t r) {
    auto b = ball(g, v, r);
    return b.graph.size() + 1 == b.graph.order();
}

// Distance from v to the nearest outer cycle of the given length.
std::size_t cycle_distance(const MatchContext& ctx, Side s, Vertex v, std::size_t len) {
    std::vector<Vertex> src;
    for (const auto& c : ctx.outer_cycles(s))
        if (c.length() == len) src.insert(src.end(), c.vertices.begin(), c.vertices.end());
    return bfs_distances(ctx.graph(s), src)[v];
}

Vertex find_vertex(const MatchContext& ctx, auto pred) {
    for (Vertex v = Vertex(ctx.N0()) + 1; v <= ctx.h1().order(); ++v)
        if (pred(v)) return v;
    FAIL("no vertex with the requested shape");
    return 0;
}

} // namespace

TEST_CASE("context validation") {
    const auto& ctx = small_ctx();
    CHECK(ctx.validated());
    CHECK(ctx.pebbles() == 2);
    CHECK(ctx.a() == 3);

    MatchContext same(ctx.h1(), ctx.h1(), ctx.n0(), ctx.N0(), ctx.m(), ctx.R());
    CHECK(validate_context(same).ok);

    // strip the outside edges of core vertex 2
    std::vector<Edge> e;
    for (auto [u, v] : ctx.h1().edges())
        if (!((u == 2 && v > ctx.N0()) || (v == 2 && u > ctx.N0()))) e.push_back({u, v});
    MatchContext broken(Graph::from_edges(ctx.h1().order(), e), ctx.h2(), ctx.n0(), ctx.N0(), ctx.m(), ctx.R());
    auto v = validate_context(broken);
    CHECK_FALSE(v.ok);
    bool q3 = false;
    for (const auto& f : v.failures) q3 = q3 || f.find("Q3") != std::string::npos;
    CHECK(q3);
    auto st = initial_state(broken);
    CHECK_THROWS_AS(respond(broken, st, 0, 1, Side::G), DomainError);

    CHECK_THROWS_AS(MatchContext(ctx.h1(), ctx.h2(), 1, 2, 2, 1), DomainError);
}

TEST_CASE("sampled contexts share their core") {
    auto c = sample_generated_context(200, 3, 1, 1, 3, 1, 3);
    if (c) CHECK(c->validated());
    // the sampler's shared prefix, checked directly
    GrowthProcess p1(3, Rng::for_path(1, {200, 0, 1}));
    p1.grow_to(200);
    Graph g1 = std::move(p1).take();
    GrowthProcess p2(induced_subgraph(g1, {1, 2, 3, 4, 5}).graph, 3, Rng::for_path(1, {200, 0, 2}));
    p2.grow_to(200);
    CHECK(induced_subgraph(p2.graph(), {1, 2, 3, 4, 5}).graph == induced_subgraph(g1, {1, 2, 3, 4, 5}).graph);
}

TEST_CASE("first move cases") {
    const auto& ctx = medium_ctx();
    Duplicator dup(ctx);
    const std::size_t rho = 4;

    SUBCASE("core vertex is copied") {
        for (Vertex x : {1u, 2u}) {
            auto st = initial_state(ctx);
            CHECK(dup.first_move(st, x, Side::G) == x);
            CHECK(st.pebbles[0].tag == Tag::Case1);
            CHECK(dup.self_check(st).empty());
        }
    }
    SUBCASE("escaping the core") {
        Vertex x = find_vertex(ctx, [&](Vertex v) { return ctx.base_distance(Side::G, v) == 2; });
        auto st = initial_state(ctx);
        Vertex y = dup.first_move(st, x, Side::G);
        const auto& p = st.pebbles[0];
        CHECK(p.tag == Tag::Case3);
        CHECK(y > ctx.N0());
        CHECK(dist(ctx.h2(), y, p.anchor) == dist(ctx.h1(), x, p.anchor));
        CHECK(dup.self_check(st).empty());
    }
    SUBCASE("near a triangle") {
        Vertex x = find_vertex(ctx, [&](Vertex v) {
            return cycle_distance(ctx, Side::G, v, 3) == 2 && ctx.base_distance(Side::G, v) > rho;
        });
        auto st = initial_state(ctx);
        Vertex y = dup.first_move(st, x, Side::G);
        CHECK(st.pebbles[0].tag == Tag::Case2);
        CHECK(cycle_distance(ctx, Side::H, y, 3) == 2);
        CHECK(dup.self_check(st).empty());
    }
    SUBCASE("far tree vertex, from either side") {
        for (Side s : {Side::G, Side::H}) {
            Vertex x = find_vertex(ctx, [&](Vertex v) {
                return ctx.base_distance(s, v) > rho && acyclic_ball(ctx.graph(s), v, rho);
            });
            auto st = initial_state(ctx);
            Vertex y = dup.first_move(st, x, s);
            const Graph& other = ctx.graph(game::other(s));
            CHECK(st.pebbles[0].tag == Tag::Case2);
            CHECK(ctx.base_distance(game::other(s), y) > rho);
            CHECK(acyclic_ball(other, y, rho));
            auto b = ball(other, y, rho);
            CHECK(canon::a_trivial(canon::RootedTree::from_graph(b.graph, b.local(y)), ctx.m() - 1));
            CHECK(dup.self_check(st).empty());
        }
    }
}

TEST_CASE("second round replies") {
    const auto& ctx = medium_ctx();
    Duplicator dup(ctx);

    SUBCASE("pebble inside the core set of a case-3 pebble") {
        bool tested = false;
        for (Vertex x = Vertex(ctx.N0()) + 1; x <= ctx.h1().order() && !tested; ++x) {
            if (ctx.base_distance(Side::G, x) != 1) continue;
            auto st = initial_state(ctx);
            dup.first_move(st, x, Side::G);
            const auto p = st.pebbles[0];
            REQUIRE(p.tag == Tag::Case3);
            for (Vertex v : p.core_set) {
                if (v == p.anchor) continue;
                auto st2 = st;
                Vertex y = dup.respond(st2, 1, v, Side::G);
                CHECK(y == v);
                CHECK(dist(ctx.h2(), y, p.anchor) == dist(ctx.h1(), v, p.anchor));
                CHECK(dist(ctx.h2(), y, p.y) == dist(ctx.h1(), v, p.x));
                CHECK(dup.self_check(st2).empty());
                tested = true;
            }
        }
        CHECK(tested);
    }
    SUBCASE("pebble inside a matched ball") {
        Vertex x = find_vertex(ctx, [&](Vertex v) {
            return ctx.base_distance(Side::G, v) > 6 && acyclic_ball(ctx.h1(), v, 4);
        });
        auto st = initial_state(ctx);
        Vertex y1 = dup.first_move(st, x, Side::G);
        auto again = st;
        CHECK(dup.respond(again, 1, x, Side::G) == y1);
        for (Vertex w : ctx.h1().neighbors(x)) {
            auto st2 = st;
            Vertex y = dup.respond(st2, 1, w, Side::G);
            CHECK(ctx.h2().adjacent(y, y1));
            CHECK(dup.self_check(st2).empty());
        }
        // two steps away, replied from H
        for (Vertex w : ctx.h2().neighbors(y1)) {
            auto st2 = st;
            Vertex y = dup.respond(st2, 1, w, Side::H);
            CHECK(ctx.h1().adjacent(y, x));
            CHECK(dup.self_check(st2).empty());
        }
    }
    SUBCASE("moving the only pebble again") {
        Vertex x = find_vertex(ctx, [&](Vertex v) { return ctx.base_distance(Side::G, v) == 3; });
        auto st = initial_state(ctx);
        dup.first_move(st, x, Side::G);
        Vertex y = dup.respond(st, 0, 1, Side::H);
        CHECK(y == 1);
        CHECK(st.pebbles[0].rd == 2);
        CHECK(dup.self_check(st).empty());
        CHECK_THROWS_AS(dup.respond(st, 0, 1, Side::G), DomainError);
    }
}

TEST_CASE("corrupted state is reported") {
    const auto& ctx = medium_ctx();
    Duplicator dup(ctx);
    Vertex x = find_vertex(ctx, [&](Vertex v) { return ctx.base_distance(Side::G, v) == 1; });
    auto st = initial_state(ctx);
    dup.first_move(st, x, Side::G);
    REQUIRE(st.pebbles[0].tag == Tag::Case3);
    REQUIRE(dup.self_check(st).empty());

    auto bad = st;
    bad.pebbles[0].core_set.push_back(Vertex(ctx.N0()) + 1);
    auto problems = dup.self_check(bad);
    REQUIRE_FALSE(problems.empty());
    CHECK(problems.front().find("v in V iff") != std::string::npos);

    bad = st;
    bad.pebbles[0].y = bad.pebbles[0].x == 1 ? 2 : 1;
    CHECK_FALSE(dup.self_check(bad).empty());

    bad = st;
    bad.pebbles[0].tag = Tag::Case1;
    CHECK_FALSE(dup.self_check(bad).empty());
}

TEST_CASE("random and adversarial playouts") {
    const auto& ctx = medium_ctx();
    Duplicator dup(ctx);
    std::size_t won = 0, clean = 0;
    const std::size_t games = 2000;
    for (std::size_t i = 0; i < games; ++i) {
        RandomSpoiler rnd(Rng::for_path(17, {i, 0}));
        AdversarialSpoiler adv(Rng::for_path(17, {i, 1}));
        for (SpoilerPolicy* sp : {static_cast<SpoilerPolicy*>(&rnd), static_cast<SpoilerPolicy*>(&adv)}) {
            auto res = duel(dup, *sp, ctx.R());
            won += res.duplicator_won;
            bool ok = res.error.empty();
            for (const auto& r : res.rounds) ok = ok && r.problems.empty() && r.partial_iso;
            clean += ok;
            if (!ok) MESSAGE(res.transcript());
        }
    }
    CHECK(won == 2 * games);
    CHECK(clean == 2 * games);
}

TEST_CASE("exhaustive Spoiler at tiny scale") {
    const auto& ctx = small_ctx();
    Duplicator dup(ctx);
    auto res = exhaustive_spoiler(dup, 1, 1'000'000);
    CHECK(res.duplicator_won);
    CHECK(res.positions == 2 * (ctx.h1().order() + ctx.h2().order()));
    CHECK_THROWS_AS(exhaustive_spoiler(dup, 1, 10), ResourceLimit);
}

TEST_CASE("exact solver agrees") {
    const auto& ctx = small_ctx();
    auto out = game::solve(ctx.h1(), ctx.h2(), {ctx.pebbles(), ctx.R()},
                           game::GameConfig::empty(ctx.pebbles(), ctx.R()));
    CHECK(out.winner == game::Player::Duplicator);
    // every strategy reply is also value-preserving for the solver
    Duplicator dup(ctx);
    game::Solver solver(ctx.h1(), ctx.h2(), {ctx.pebbles(), ctx.R()});
    auto cfg = game::GameConfig::empty(ctx.pebbles(), ctx.R());
    for (Vertex v = 1; v <= ctx.h1().order(); v += 7) {
        auto st = initial_state(ctx);
        Vertex y = dup.first_move(st, v, Side::G);
        game::SpoilerMove mv{Side::G, 0, v};
        CHECK(solver.compatible(cfg, mv, y));
        CHECK_FALSE(solver.spoiler_wins(game::apply(cfg, mv, y)));
    }
}

TEST_CASE("duel transcript") {
    const auto& ctx = medium_ctx();
    Duplicator dup(ctx);
    RandomSpoiler sp(Rng(4));
    auto res = duel(dup, sp, 2);
    auto t = res.transcript();
    CHECK(t.find("# round 1 self-check ok") != std::string::npos);
    CHECK(t.find("# round 2 self-check ok") != std::string::npos);
    CHECK(t.find("winner duplicator") != std::string::npos);

    std::istringstream in("x\n3 G 1\n1 Q 2\n1 G 999999\n2 G 1\nquit\n");
    std::ostringstream out;
    StreamSpoiler human(in, out);
    auto r2 = duel(dup, human, 2);
    REQUIRE(r2.rounds.size() == 1);
    CHECK(r2.rounds[0].move.pebble == 1);
    CHECK(r2.rounds[0].reply == 1);
    CHECK(out.str().find("vertex out of range") != std::string::npos);
}

TEST_CASE("context file round trip") {
    const auto& ctx = small_ctx();
    auto dir = std::filesystem::temp_directory_path() / "uag_ctx_test";
    std::filesystem::create_directories(dir);
    auto path = (dir / "ctx.json").string();
    save_context(path, ctx, "h1.txt", "h2.txt");
    auto back = load_context(path);
    CHECK(back.h1() == ctx.h1());
    CHECK(back.h2() == ctx.h2());
    CHECK(back.N0() == ctx.N0());
    CHECK_FALSE(back.validated());
    CHECK(validate_context(back).ok);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(load_context((dir / "missing.json").string()), DomainError);
}
