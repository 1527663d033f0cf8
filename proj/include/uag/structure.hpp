#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uag/graph.hpp"

namespace uag::structure {

enum class Q3Form {
    AtLeastK,        // every core vertex has degree >= K
    AtLeastN0PlusM,  // every core vertex has degree >= N0 + m
};

struct StructureParams {
    std::size_t a = 3;
    std::size_t n0 = 1;
    std::size_t N0 = 1;
    std::size_t K = 1;
    std::size_t m = 1;
    Q3Form q3_form = Q3Form::AtLeastN0PlusM;
    bool stop_at_first = false;           // return after the first violation of a clause
    std::size_t node_budget = 50'000'000;  // DFS steps per clause before ResourceLimit

    void validate() const;
    std::size_t q3_threshold() const { return q3_form == Q3Form::AtLeastK ? K : N0 + m; }
};

struct Q1Violation {
    int clause = 0;  // 1, 2 or 3
    std::vector<Vertex> cycle;   // clauses 1 and 3
    std::vector<Vertex> cycle2;  // clause 3
    std::vector<Vertex> path;    // clause 1 (core to cycle) or 2 (core to core)
};

struct Q1Report {
    bool pass = true;
    std::vector<Q1Violation> violations;
};

struct Q2Report {
    bool pass = true;
    std::vector<std::size_t> counts;  // counts[b] for b = 3..a, cycles avoiding [N0]
};

struct Q3Report {
    bool pass = true;
    std::size_t threshold = 0;
    std::vector<Vertex> offending;
};

struct StructureReport {
    Q1Report q1;
    Q2Report q2;
    Q3Report q3;
    bool pass() const { return q1.pass && q2.pass && q3.pass; }
};

Q1Report check_q1(const Graph& g, const StructureParams& p);
Q2Report check_q2(const Graph& g, const StructureParams& p);
Q3Report check_q3(const Graph& g, const StructureParams& p);
StructureReport check_all(const Graph& g, const StructureParams& p);

// Re-checks one reported violation from scratch.
bool violation_holds(const Graph& g, const StructureParams& p, const Q1Violation& v);

struct DegreeStats {
    std::vector<std::size_t> n;
    std::vector<std::size_t> max_degree;
    std::vector<double> ratio;  // max_degree / (ln n)^2
};

struct CycleStats {
    std::vector<std::size_t> n;
    std::vector<std::vector<std::uint64_t>> counts;  // counts[i][k] for k = 3..a
};

DegreeStats degree_trajectory(const GenParams& p, const std::vector<std::size_t>& checkpoints);
CycleStats cycle_trajectory(const GenParams& p, std::size_t a, const std::vector<std::size_t>& checkpoints);

// Number of cycles of length 3..a through the vertex `v`, using only
// vertices below v; counts[k].
std::vector<std::uint64_t> cycles_closed_by(const Graph& g, Vertex v, std::size_t a);

enum class Neighborhood {
    TreeTrivial,
    TreeNontrivial,
    UnicyclicTrivial,
    UnicyclicNontrivial,
    CoreAdjacent,
    Complex,
};

std::string to_string(Neighborhood n);

// Classifies ball(g, v, radius). `core` > 0 reports CoreAdjacent when the ball
// meets [core]; triviality is tested with parameter a for trees and a - 1
// for unicyclic balls.
Neighborhood neighborhood_classification(const Graph& g, Vertex v, std::size_t radius, std::size_t a,
                                         std::size_t core = 0);

// Pass counts of every clause for one graph across a grid of (n0, N0).
struct GridPoint {
    std::size_t n0 = 0;
    std::size_t N0 = 0;
};

struct GridResult {
    GridPoint point;
    std::size_t trials = 0;
    std::size_t q1 = 0, q2 = 0, q3 = 0, all = 0;
};

struct SearchConfig {
    std::size_t n = 0;
    std::size_t m = 2;
    std::size_t a = 3;
    std::size_t K = 2;
    Q3Form q3_form = Q3Form::AtLeastN0PlusM;
    std::vector<GridPoint> grid;
    std::size_t seeds = 10;
    std::uint64_t base_seed = 0;
};

std::vector<GridResult> search_parameters(const SearchConfig& cfg);

} // namespace uag::structure
