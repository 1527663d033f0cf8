#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "uag/error.hpp"
#include "uag/fo.hpp"

using namespace uag;
using namespace uag::fo;

namespace {
const char* kDiameter2 = "Ax.Ay.(!(x=y) & !(x~y)) -> Ez.((x~z) & (z~y))";
}

TEST_CASE("parse diameter sentence") {
    Formula f = parse(kDiameter2);
    Formula expected = forall(
        "x", forall("y", implies(conj(neg(eq("x", "y")), neg(adj("x", "y"))),
                                 exists("z", conj(adj("x", "z"), adj("z", "y"))))));
    CHECK(f == expected);
    CHECK(distinct_variables(f) == 3);
    CHECK(quantifier_depth(f) == 3);
}

TEST_CASE("parse basics and errors") {
    CHECK(distinct_variables(parse("Ex.(x=x)")) == 1);
    CHECK(distinct_variables(parse("Ex.Ey.(x~y & Ex.(x~y))")) == 2);
    CHECK_THROWS_AS(parse("x~y"), DomainError);
    CHECK(parse("x~y", false) == adj("x", "y"));
    CHECK_THROWS_AS(parse("Ex.(x~)"), ParseError);
    CHECK_THROWS_AS(parse("Ex.(x=x"), ParseError);
    CHECK_THROWS_AS(parse("x=x <-> y=y <-> x~y", false), ParseError);
    CHECK(parse("(x=x <-> y=y) <-> x~y", false) == iff(iff(eq("x", "x"), eq("y", "y")), adj("x", "y")));
    CHECK_THROWS_AS(parse("Qx.(x=x)"), ParseError);
    CHECK_THROWS_AS(parse(""), ParseError);
    try {
        parse("Ex.(x ? x)");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position == 6);
    }
    // implication is right associative
    CHECK(parse("x=x -> y=y -> z=z", false) ==
          implies(eq("x", "x"), implies(eq("y", "y"), eq("z", "z"))));
    // precedence: ! > & > | > ->
    CHECK(parse("!x=y & x~y | y~x -> x=x", false) ==
          implies(disj(conj(neg(eq("x", "y")), adj("x", "y")), adj("y", "x")), eq("x", "x")));
}

TEST_CASE("quantifier depth") {
    CHECK(quantifier_depth(parse("x~y & !(x=y)", false)) == 0);
    CHECK(quantifier_depth(parse("(Ex.Ey.(x~y)) & (Ez.(z=z))")) == 2);
    CHECK(quantifier_depth(conj(parse("Ex.Ey.(x~y)"), parse("Ez.(z=z)"))) == 2);
    // an unparenthesised quantifier body runs to the end of the input
    CHECK(quantifier_depth(parse("Ex.Ey.(x~y) & Ez.(z=z)")) == 3);
}

TEST_CASE("canonical print") {
    CHECK(canonical_print(parse("Ex.(x = x)")) == "Ex.((x = x))");
    Formula nested = parse("Ex.Ay.Ez.(x~y | z=y)");
    CHECK(canonical_print(nested) == "Ex.(Ay.(Ez.(((x ~ y) | (z = y)))))");
    Rng rng(5);
    std::vector<std::string> vars{"x", "y", "z"};
    for (int i = 0; i < 1000; ++i) {
        Formula f = oracle::random_sentence(rng, 1 + i % 4, vars);
        Formula back = parse(canonical_print(f));
        CHECK(back == f);
        CHECK(canonical_print(back) == canonical_print(f));
    }
    // negated and quantified operands keep their extent
    Formula tricky = conj(neg(exists("x", eq("x", "x"))), exists("y", eq("y", "y")));
    CHECK(parse(canonical_print(tricky)) == tricky);
}

TEST_CASE("evaluate examples") {
    Formula d2 = parse(kDiameter2);
    CHECK(evaluate(d2, complete_graph(4)));
    CHECK_FALSE(evaluate(d2, oracle::path_graph(4)));
    CHECK(evaluate(d2, oracle::path_graph(3)));
    Formula far = parse("Ex.Ey.(!(x=y) & !(x~y))");
    CHECK(evaluate(far, oracle::cycle_graph(4)));
    CHECK_FALSE(evaluate(far, oracle::cycle_graph(3)));
    CHECK(evaluate(parse("x~y", false), oracle::path_graph(3), {{"x", 1}, {"y", 2}}));
    CHECK_THROWS_AS(evaluate(parse("x~y", false), oracle::path_graph(3), {{"x", 1}}), DomainError);
    // rebinding a name overwrites its slot and restores it afterwards
    Formula reuse = parse("Ex.Ey.(x~y & Ex.(x~y & !(Ey.(y=y & !(x~y)))))");
    Evaluator ev(reuse);
    CHECK(ev.slots().size() == 2);
    CHECK(ev(complete_graph(3)) == oracle::table_evaluate(reuse, complete_graph(3)));
}

TEST_CASE("guarded quantifiers agree with the table evaluator") {
    std::vector<std::string> sentences = {
        kDiameter2,
        "Ax.Ey.(x~y & Ez.(z~y & !(z=x)))",
        "Ax.Ay.(x~y -> Ez.(z~x & z~y))",
        "Ex.Ay.(y=x | y~x)",
        "Ax.Ay.((x~y & !(x=y)) -> Ex.(x=y & Ey.(y~x)))",
        "Ex.Ey.(x=y & y~x)",
    };
    for (std::uint64_t s = 0; s < 30; ++s) {
        auto g = generate({7, 1 + s % 3, s});
        for (auto& text : sentences) {
            auto f = parse(text);
            CHECK(evaluate(f, g) == oracle::table_evaluate(f, g));
        }
    }
}

TEST_CASE("evaluator agrees with the table oracle on random sentences") {
    Rng rng(17);
    std::vector<std::string> vars{"x", "y", "z"};
    auto graphs = oracle::nonisomorphic_graphs(4);
    for (int i = 0; i < 120; ++i) {
        Formula f = oracle::random_sentence(rng, 3, vars);
        for (auto& g : graphs) CHECK(evaluate(f, g) == oracle::table_evaluate(f, g));
    }
}

TEST_CASE("evaluation is isomorphism invariant") {
    Rng rng(23);
    std::vector<std::string> vars{"x", "y", "z"};
    for (int i = 0; i < 60; ++i) {
        auto g = generate({8, 2, static_cast<std::uint64_t>(i)});
        std::vector<Vertex> perm(8);
        std::iota(perm.begin(), perm.end(), 1);
        for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
        auto pg = oracle::permuted(g, perm);
        Formula f = oracle::random_sentence(rng, 3, vars);
        CHECK(evaluate(f, g) == evaluate(f, pg));
    }
}

TEST_CASE("definability oracle witnesses") {
    auto c3 = oracle::cycle_graph(3), c4 = oracle::cycle_graph(4);
    auto sep = oracle::fo_separation(c3, c4, 2, 2);
    REQUIRE(sep.separated);
    REQUIRE(sep.witness);
    CHECK(evaluate(*sep.witness, c3) != evaluate(*sep.witness, c4));
    CHECK(distinct_variables(*sep.witness) <= 2);
    CHECK(quantifier_depth(*sep.witness) <= 2);
    CHECK_FALSE(oracle::fo_separation(complete_graph(3), complete_graph(4), 2, 3).separated);
    CHECK_FALSE(oracle::fo_separation(c4, c4, 2, 3).separated);
    // three variables never count past three elements
    CHECK_FALSE(oracle::fo_separation(complete_graph(3), complete_graph(4), 3, 5).separated);
    CHECK_FALSE(oracle::fo_separation(complete_graph(3), complete_graph(4), 4, 3).separated);
    auto k = oracle::fo_separation(complete_graph(3), complete_graph(4), 4, 4);
    REQUIRE(k.separated);
    CHECK(evaluate(*k.witness, complete_graph(3)) != evaluate(*k.witness, complete_graph(4)));
}
