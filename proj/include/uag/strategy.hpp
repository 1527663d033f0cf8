#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uag/graph.hpp"
#include "uag/pebble_game.hpp"
#include "uag/rng.hpp"

namespace uag::strategy {

struct Validation {
    bool ok = false;
    std::vector<std::string> failures;
};

class MatchContext;
// Checks every hypothesis the strategy relies on; marks the context usable on
// success.
Validation validate_context(MatchContext& ctx);

// The two graphs of a match plus the structural parameters. Both graphs must
// agree on [N0] and satisfy Q1-Q3 with a = 3^R, K = m and the N0+m degree
// form; operations refuse contexts that have not been validated.
class MatchContext {
public:
    MatchContext(Graph h1, Graph h2, std::size_t n0, std::size_t N0, std::size_t m, std::size_t R);

    const Graph& graph(game::Side s) const { return s == game::Side::G ? h1_ : h2_; }
    const Graph& h1() const { return h1_; }
    const Graph& h2() const { return h2_; }
    std::size_t n0() const { return n0_; }
    std::size_t N0() const { return N0_; }
    std::size_t m() const { return m_; }
    std::size_t R() const { return R_; }
    std::size_t pebbles() const { return m_ - 2; }
    std::size_t a() const;

    // d(v, [n0]) in the given graph.
    std::size_t base_distance(game::Side s, Vertex v) const;
    // d(v, [n0]) inside H|[N0]; kInfinity for v outside [N0].
    std::size_t core_distance(Vertex v) const;
    // Cycles of length <= cycle_limit() with every vertex outside [N0].
    const std::vector<Cycle>& outer_cycles(game::Side s) const;
    std::size_t cycle_limit() const { return cycle_limit_; }

    bool validated() const { return validated_; }
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    friend Validation validate_context(MatchContext& ctx);

    Graph h1_, h2_;
    std::size_t n0_, N0_, m_, R_;
    std::size_t cycle_limit_ = 0;
    std::vector<std::size_t> base1_, base2_, core_;
    std::vector<Cycle> cycles1_, cycles2_;
    bool validated_ = false;
    std::vector<std::string> diagnostics_;
};

// Case1: y = x near [n0] inside the core. Case2: matching trivial balls away
// from [n0]. Case3: matching trees hanging off a common core vertex.
enum class Tag { Unset, Case1, Case2, Case3 };

std::string to_string(Tag t);

struct PebbleRecord {
    bool placed = false;
    Vertex x = 0;  // in H1
    Vertex y = 0;  // in H2
    Tag tag = Tag::Unset;
    std::size_t rd = 0;  // round in which the pebble was last placed
    Vertex anchor = 0;   // u_i for Case3
    std::vector<Vertex> core_set;  // V_i for Case3, ascending
};

struct StrategyState {
    std::vector<PebbleRecord> pebbles;
    std::size_t round = 0;  // rounds played
};

StrategyState initial_state(const MatchContext& ctx);

// Duplicator engine with reusable search buffers. One instance per thread.
class Duplicator {
public:
    explicit Duplicator(const MatchContext& ctx);
    ~Duplicator();
    Duplicator(const Duplicator&) = delete;
    Duplicator& operator=(const Duplicator&) = delete;

    // Round 1 reply; `pebble` is 0-based.
    Vertex first_move(StrategyState& st, Vertex x, game::Side side, std::size_t pebble = 0);
    // Reply to Spoiler placing `pebble` on `x` in `side` in round st.round + 1.
    // Throws ExhaustionError when no admissible vertex exists.
    Vertex respond(StrategyState& st, std::size_t pebble, Vertex x, game::Side side);
    // Every violated invariant, one line each.
    std::vector<std::string> self_check(const StrategyState& st);

    const MatchContext& context() const { return ctx_; }

private:
    struct Impl;
    const MatchContext& ctx_;
    std::unique_ptr<Impl> impl_;
};

Vertex first_move(const MatchContext& ctx, StrategyState& st, Vertex x, game::Side side);
Vertex respond(const MatchContext& ctx, StrategyState& st, std::size_t pebble, Vertex x, game::Side side);
std::vector<std::string> self_check(const MatchContext& ctx, const StrategyState& st);

// Matches between the strategy and a Spoiler.

struct RoundRecord {
    std::size_t round = 0;
    game::SpoilerMove move;
    Vertex reply = 0;
    bool partial_iso = true;
    std::vector<std::string> problems;  // self_check output after the reply
};

struct DuelResult {
    bool duplicator_won = true;
    std::vector<RoundRecord> rounds;
    std::string error;  // set when the strategy threw
    // Pebble-game transcript plus a self-check line per round.
    std::string transcript() const;
};

class SpoilerPolicy {
public:
    virtual ~SpoilerPolicy() = default;
    // nullopt ends the match early (e.g. a human quitting).
    virtual std::optional<game::SpoilerMove> next(const MatchContext& ctx, const StrategyState& st) = 0;
};

class RandomSpoiler : public SpoilerPolicy {
public:
    explicit RandomSpoiler(Rng rng) : rng_(rng) {}
    std::optional<game::SpoilerMove> next(const MatchContext& ctx, const StrategyState& st) override;

private:
    Rng rng_;
};

// Prefers vertices at the distance thresholds around existing pebbles, short
// cycles and the core boundary, where the case analysis switches.
class AdversarialSpoiler : public SpoilerPolicy {
public:
    explicit AdversarialSpoiler(Rng rng) : rng_(rng) {}
    std::optional<game::SpoilerMove> next(const MatchContext& ctx, const StrategyState& st) override;

private:
    Rng rng_;
};

// Reads "pebble side vertex" lines (1-based pebble, side G|H) or "quit".
class StreamSpoiler : public SpoilerPolicy {
public:
    StreamSpoiler(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
    std::optional<game::SpoilerMove> next(const MatchContext& ctx, const StrategyState& st) override;

private:
    std::istream& in_;
    std::ostream& out_;
};

DuelResult duel(Duplicator& dup, SpoilerPolicy& spoiler, std::size_t rounds);

struct ExhaustiveResult {
    bool duplicator_won = true;
    std::uint64_t positions = 0;  // Spoiler moves answered
    std::vector<RoundRecord> counterexample;
    std::string error;
};

// Every Spoiler move sequence of the given length; throws ResourceLimit when
// the number of answered moves exceeds the budget.
ExhaustiveResult exhaustive_spoiler(Duplicator& dup, std::size_t rounds, std::uint64_t budget);

// Synthetic contexts: a core tree on [N0] whose vertices carry pendant
// (m-1)-ary trees, planted cycles of every length 3..a (m copies each, each
// cycle vertex carrying m-2 pendant trees), and the tree leaves joined by a
// random pairing with short cycles switched away. H1 and H2 share the core
// and differ elsewhere.
struct SyntheticSpec {
    std::size_t R = 1;
    std::size_t m = 4;
    std::size_t n0 = 1;
    std::size_t N0 = 2;
    std::size_t copies = 0;  // planted cycles per length; 0 means m
    std::uint64_t seed = 0;
    std::size_t max_vertices = 2'000'000;
};

// Estimated order of one synthetic graph.
std::size_t synthetic_order(const SyntheticSpec& spec);
// Builds, validates and returns a context; throws ResourceLimit when the
// estimated order exceeds max_vertices and ExhaustionError when validation
// keeps failing.
MatchContext synthetic_context(const SyntheticSpec& spec);

// Two G_{n,m} samples that share their first N0 vertices (the second graph
// continues the first one's growth from [N0] on an independent stream),
// resampled until the context validates.
std::optional<MatchContext> sample_generated_context(std::size_t n, std::size_t m, std::size_t R, std::size_t n0,
                                                     std::size_t N0, std::uint64_t seed, std::size_t tries);

// Context file: JSON with paths to both graph files and the parameters.
MatchContext load_context(const std::string& path);
void save_context(const std::string& path, const MatchContext& ctx, const std::string& graph1,
                  const std::string& graph2);

} // namespace uag::strategy
