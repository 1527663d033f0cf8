#pragma once

// Slow, independent reference implementations used by the unit tests and
// the acceptance suite.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <optional>

#include "uag/canonical.hpp"
#include "uag/fo.hpp"
#include "uag/graph.hpp"
#include "uag/rng.hpp"

namespace oracle {

using uag::Graph;
using uag::Vertex;

Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph star_graph(std::size_t leaves);

// Shortest simple path by exhaustive enumeration (kInfinity if none).
std::size_t brute_distance(const Graph& g, Vertex u, Vertex v);

// All simple cycles of length <= a, via vertex subsets and permutations.
std::vector<uag::Cycle> brute_cycles(const Graph& g, std::size_t a);

// Canonical adjacency bitmask under all vertex permutations (n <= 8).
std::uint64_t brute_canonical_form(const Graph& g);

// One representative per isomorphism class, for every order 1..max_n.
std::vector<Graph> nonisomorphic_graphs(std::size_t max_n);

// Exact law of G_{n,m}: map from sorted edge list to probability.
std::map<std::vector<uag::Edge>, double> attachment_distribution(std::size_t n, std::size_t m);

Graph permuted(const Graph& g, const std::vector<Vertex>& perm);  // perm[v-1] = image of v

// Bottom-up evaluator: computes the full truth table of every subformula over
// assignments to its free variables, then projects quantifiers.
bool table_evaluate(const uag::fo::Formula& f, const Graph& g, const uag::fo::Assignment& env = {});

// Random sentence of quantifier depth <= max_depth over the given names.
uag::fo::Formula random_sentence(uag::Rng& rng, std::size_t max_depth, const std::vector<std::string>& vars);

// Decides whether some FO sentence with <= gamma variables and quantifier
// depth <= rounds separates g and h, by refining the partition of variable
// assignments depth by depth. Independent of the game solver; when the
// graphs are separated a witness sentence is built.
struct Separation {
    bool separated = false;
    std::optional<uag::fo::Formula> witness;
};
Separation fo_separation(const Graph& g, const Graph& h, std::size_t gamma, std::size_t rounds);

// Every rooted tree on n vertices exactly once, by level sequences
// (Beyer-Hedetniemi successor rule).
std::vector<uag::canon::RootedTree> rooted_trees(std::size_t n);

// Rooted isomorphism by backtracking over child matchings. Masks select
// the surviving vertices (empty mask: all).
bool brute_rooted_isomorphic(const uag::canon::RootedTree& a, const uag::canon::RootedTree& b,
                             const std::vector<char>& mask_a = {}, const std::vector<char>& mask_b = {});

// The trimming procedure with classes found by brute_rooted_isomorphic.
uag::canon::RootedTree brute_trim(const uag::canon::RootedTree& t, std::size_t a);

// Every simple path with at most max_edges edges, each direction listed.
std::vector<std::vector<Vertex>> all_simple_paths(const Graph& g, std::size_t max_edges);

// Direct readings of Q1/Q2/Q3 over exhaustive path and cycle lists.
bool brute_q1(const Graph& g, std::size_t a, std::size_t n0, std::size_t N0);
bool brute_q2(const Graph& g, std::size_t a, std::size_t N0, std::size_t K);
bool brute_q3(const Graph& g, std::size_t N0, std::size_t threshold);

} // namespace oracle
