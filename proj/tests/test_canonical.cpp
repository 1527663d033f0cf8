#include <doctest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "uag/canonical.hpp"
#include "uag/error.hpp"

using namespace uag;
using namespace uag::canon;

namespace {

RootedTree star(std::size_t leaves) { return RootedTree::from_graph(oracle::star_graph(leaves), 1); }

RootedTree tree(std::vector<int> parent) { return RootedTree::from_parents(std::move(parent)); }

bool same(const RootedTree& a, const RootedTree& b) { return oracle::brute_rooted_isomorphic(a, b); }

} // namespace

TEST_CASE("rooted tree basics") {
    auto t = RootedTree::perfect(2, 2);
    CHECK(t.size() == 7);
    CHECK(t.depth() == 2);
    CHECK(same(subtree(t, t.root()), t));
    CHECK(subtree(t, 6).size() == 1);
    CHECK(same(subtree(t, 1), RootedTree::perfect(2, 1)));
    CHECK_THROWS_AS(subtree(t, 7), DomainError);
    CHECK_THROWS_AS(tree({-1, -1}), DomainError);
    CHECK_THROWS_AS(tree({1, 0}), DomainError);
    CHECK_THROWS_AS(RootedTree::from_graph(oracle::cycle_graph(4), 1), DomainError);
}

TEST_CASE("trim examples") {
    auto p = RootedTree::perfect(3, 3);
    CHECK(same(trim(p, 3), p));
    CHECK(same(trim(star(5), 3), star(3)));
    // root, 4 leaves, and a path of length 2
    auto t = tree({-1, 0, 0, 0, 0, 0, 5});
    auto want = tree({-1, 0, 0, 0, 3});
    CHECK(same(trim(t, 2), want));
    CHECK(same(oracle::brute_trim(t, 2), want));
}

TEST_CASE("a-isomorphism and triviality") {
    CHECK(a_isomorphic(star(4), star(7), 3));
    CHECK_FALSE(a_isomorphic(star(2), star(3), 3));
    CHECK(canon_code(star(4), 3) == canon_code(star(9), 3));
    CHECK(canon_code(tree({-1}), 2) == canon_code(tree({-1}), 5));
    CHECK(canon_code(star(2), 3) != canon_code(tree({-1, 0, 1}), 3));
    CHECK(a_trivial(RootedTree::perfect(3, 3), 3));
    CHECK(a_trivial(star(6), 3));
    CHECK_FALSE(a_trivial(tree({-1, 0, 1}), 2));
    CHECK_FALSE(a_trivial(star(2), 3));
    // every leaf must sit at full depth
    CHECK_FALSE(a_trivial(tree({-1, 0, 0, 1, 1}), 2));
    CHECK(a_trivial(tree({-1, 0, 0, 1, 1, 2, 2, 2}), 2));
}

TEST_CASE("enumeration counts") {
    const std::size_t counts[] = {0, 1, 1, 2, 4, 9, 20, 48, 115, 286};
    for (std::size_t n = 1; n <= 9; ++n) {
        auto ts = oracle::rooted_trees(n);
        CHECK(ts.size() == counts[n]);
        std::set<CanonCode> codes;
        for (const auto& t : ts) codes.insert(tree_code(t));
        CHECK(codes.size() == ts.size());
    }
}

TEST_CASE("fused code agrees with literal trimming") {
    std::vector<RootedTree> all;
    for (std::size_t n = 1; n <= 8; ++n)
        for (auto& t : oracle::rooted_trees(n)) all.push_back(std::move(t));
    for (std::size_t a : {1, 2, 3}) {
        std::vector<RootedTree> trimmed;
        for (const auto& t : all) {
            trimmed.push_back(oracle::brute_trim(t, a));
            CHECK(canon_code(t, a) == tree_code(trim(t, a)));
            CHECK(same(trim(t, a), trimmed.back()));
            CHECK(a_trivial(t, a) == same(trimmed.back(), RootedTree::perfect(a, t.depth())));
        }
        for (std::size_t i = 0; i < all.size(); i += 3)
            for (std::size_t j = 0; j < all.size(); ++j)
                CHECK(a_isomorphic(all[i], all[j], a) == same(trimmed[i], trimmed[j]));
    }
}

TEST_CASE("unicyclic trimming") {
    auto c5 = RootedUnicyclic(oracle::cycle_graph(5), 1);
    CHECK(c5.cycle().size() == 5);
    CHECK(c5.path().size() == 1);
    CHECK(trim_unicyclic(c5, 2).graph() == c5.graph());
    CHECK_FALSE(unicyclic_a_trivial(c5, 2));

    // triangle 1-2-3 with five leaves on vertex 1
    std::vector<Edge> e{{1, 2}, {1, 3}, {2, 3}};
    for (Vertex v = 4; v <= 8; ++v) e.push_back({1, v});
    RootedUnicyclic c(Graph::from_edges(8, e), 2);
    auto tc = trim_unicyclic(c, 3);
    CHECK(tc.graph().order() == 6);
    CHECK(tc.graph().degree(1) == 5);
    CHECK(unicyclic_a_isomorphic(c, tc, 3));
    CHECK_FALSE(unicyclic_a_isomorphic(c, tc, 5));

    CHECK_THROWS_AS(RootedUnicyclic(oracle::path_graph(4), 1), DomainError);
    CHECK_THROWS_AS(RootedUnicyclic(Graph::from_edges(4, {{1, 2}, {1, 3}, {2, 3}, {1, 4}, {2, 4}}), 1),
                    DomainError);
}

TEST_CASE("unicyclic with off-cycle root") {
    // root 1 - 2 - 3, cycle 3-4-5; 1 has three extra leaves, 2 has four
    std::vector<Edge> e{{1, 2}, {2, 3}, {3, 4}, {4, 5}, {3, 5}};
    Vertex next = 6;
    for (int i = 0; i < 3; ++i) e.push_back({1, next++});
    for (int i = 0; i < 4; ++i) e.push_back({2, next++});
    RootedUnicyclic c(Graph::from_edges(next - 1, e), 1);
    CHECK(c.path() == std::vector<Vertex>{1, 2, 3});
    CHECK(c.cycle().size() == 3);
    CHECK(c.hanging(1).size() == 4);
    CHECK(c.hanging(2).size() == 5);
    CHECK(c.hanging(4).size() == 1);
    auto t = trim_unicyclic(c, 2);
    CHECK(t.graph().order() == 5 + 2 + 2);
    CHECK(t.hanging(t.path()[0]).size() == 3);
    CHECK(t.hanging(t.path()[1]).size() == 3);
    CHECK(unicyclic_code(c, 2) == unicyclic_plain_code(t));
}

TEST_CASE("perfect unicyclic graphs are trivial") {
    // root on a 4-cycle, a=2, depth 3: each cycle vertex v carries a perfect
    // binary tree of depth 3 - d(root, v)
    auto build = [](std::size_t wrong) {
        std::vector<Edge> e{{1, 2}, {2, 3}, {3, 4}, {1, 4}};
        const std::size_t hang[] = {3, 2, 1, 2};
        Vertex next = 5;
        for (Vertex v = 1; v <= 4; ++v) {
            std::size_t d = hang[v - 1] - (v == wrong ? 1 : 0);
            std::vector<Vertex> frontier{v};
            for (std::size_t k = 0; k < d; ++k) {
                std::vector<Vertex> nf;
                for (Vertex u : frontier)
                    for (int j = 0; j < 3; ++j) {
                        e.push_back({u, next});
                        nf.push_back(next++);
                    }
                frontier = nf;
            }
        }
        return RootedUnicyclic(Graph::from_edges(next - 1, e), 1);
    };
    auto ok = build(0);
    CHECK(ok.depth() == 3);
    CHECK(unicyclic_a_trivial(ok, 2));
    CHECK(unicyclic_a_trivial(ok, 3));
    CHECK_FALSE(unicyclic_a_trivial(ok, 4));
    CHECK_FALSE(unicyclic_a_trivial(build(2), 2));
}

TEST_CASE("pendant subgraphs") {
    auto p = oracle::path_graph(5);
    CHECK(is_pendant(p, {1, 2, 3, 4, 5}));
    CHECK(is_pendant(p, {1, 2}));
    CHECK(is_pendant(p, {2, 3, 4}));
    CHECK(is_pendant(p, {1, 2, 3}));
    auto s = oracle::star_graph(4);
    CHECK(is_pendant(s, {1, 2, 3, 4, 5}));
    CHECK_FALSE(is_pendant(s, {1, 2, 3}));
}

TEST_CASE("tree file round trip") {
    auto t = tree({2, 2, -1, 0, 1});
    std::stringstream ss;
    write_tree(ss, t);
    auto back = read_tree(ss);
    CHECK(back.root() == 0);
    CHECK(same(back, t));
    std::istringstream bad("3\n2 1\n2 1\n");
    CHECK_THROWS_AS(read_tree(bad), DomainError);
}
