#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "uag/graph.hpp"

namespace uag::game {

inline constexpr std::size_t kDefaultBudget = 100'000'000;

struct GameParams {
    std::size_t gamma = 1;
    std::size_t rounds = 0;
};

enum class Side { G, H };
enum class Player { Spoiler, Duplicator };

inline Side other(Side s) { return s == Side::G ? Side::H : Side::G; }
char side_char(Side s);

// One pebble pair; 0 marks an unplaced pebble.
struct Placement {
    Vertex g = 0;
    Vertex h = 0;
    bool placed() const { return g != 0; }
    Vertex on(Side s) const { return s == Side::G ? g : h; }
    auto operator<=>(const Placement&) const = default;
};

struct GameConfig {
    std::vector<Placement> pebbles;  // size gamma
    std::size_t rounds_left = 0;

    static GameConfig empty(std::size_t gamma, std::size_t rounds) {
        return GameConfig{std::vector<Placement>(gamma), rounds};
    }
};

struct SpoilerMove {
    Side side = Side::G;
    std::size_t pebble = 0;  // 0-based
    Vertex vertex = 0;
};

// Spoiler strategy tree: a move plus the continuation for every
// Duplicator reply that does not lose on the spot.
struct StrategyTree {
    SpoilerMove move;
    std::vector<std::pair<Vertex, std::shared_ptr<const StrategyTree>>> replies;
    std::size_t depth() const;
};

struct GameOutcome {
    Player winner = Player::Duplicator;
    std::shared_ptr<const StrategyTree> witness;  // set when Spoiler wins and requested
};

bool partial_iso(const GameConfig& cfg, const Graph& g, const Graph& h);

// Applies a Spoiler move and Duplicator reply; returns the new configuration
// with one round fewer.
GameConfig apply(const GameConfig& cfg, const SpoilerMove& mv, Vertex reply);

struct Reply {
    Vertex vertex = 0;
    bool keeps_value = false;  // Duplicator still wins after this reply
    bool legal = false;        // the configuration stays a partial isomorphism
    std::size_t survival = 0;  // further rounds survived against best play
};

// Exact memoised solver. The memo key is the sorted multiset of placed pairs
// plus the rounds left, so pebble indices are interchangeable.
class Solver {
public:
    Solver(const Graph& g, const Graph& h, GameParams p, std::size_t budget = kDefaultBudget);

    // Whether Spoiler wins from an alive configuration.
    bool spoiler_wins(const GameConfig& cfg);
    GameOutcome solve(const GameConfig& start, bool want_witness = true);
    // A winning Spoiler move, if one exists.
    std::optional<SpoilerMove> winning_move(const GameConfig& cfg);
    // Largest j <= cfg.rounds_left such that Duplicator survives j rounds.
    std::size_t survival(const GameConfig& cfg);
    // A value-preserving reply (same label preferred), else the longest-surviving one.
    Reply best_reply(const GameConfig& cfg, const SpoilerMove& mv);

    std::vector<SpoilerMove> moves(const GameConfig& cfg) const;
    bool compatible(const GameConfig& cfg, const SpoilerMove& mv, Vertex reply) const;
    std::size_t memo_size() const { return memo_.size(); }
    const Graph& graph(Side s) const { return s == Side::G ? g_ : h_; }

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<Vertex>& k) const;
    };
    std::vector<Vertex> key(const GameConfig& cfg) const;
    std::shared_ptr<const StrategyTree> build_witness(const GameConfig& cfg);

    const Graph& g_;
    const Graph& h_;
    GameParams p_;
    std::size_t budget_;
    std::unordered_map<std::vector<Vertex>, bool, KeyHash> memo_;
};

GameOutcome solve(const Graph& g, const Graph& h, GameParams p, const GameConfig& start,
                  std::size_t budget = kDefaultBudget);

// Plain recursion over every pebble index, no memo; for cross-checks.
bool spoiler_wins_naive(const Graph& g, const Graph& h, const GameConfig& cfg);

Reply duplicator_best_reply(const Graph& g, const Graph& h, GameParams p, const GameConfig& cfg,
                            const SpoilerMove& mv, std::size_t budget = kDefaultBudget);

bool equivalence_check(const Graph& g, const Graph& h, std::size_t gamma, std::size_t rounds,
                       std::size_t budget = kDefaultBudget);

// Transcript: one line per half-move, "r side pebble vertex" with 1-based
// pebble index; side is the graph the pebble was placed in.
struct TranscriptLine {
    std::size_t round;
    Side side;
    std::size_t pebble;
    Vertex vertex;
};

struct Transcript {
    std::vector<TranscriptLine> lines;
    std::optional<Player> winner;  // unset if the session was quit early
    std::string str() const;
};

// Machine side plays optimally via the solver. Human input is read from `in`
// ("pebble side vertex" for Spoiler, "vertex" for Duplicator, "quit" to stop);
// prompts and diagnostics go to `out`. Illegal input is re-prompted.
Transcript interactive_session(const Graph& g, const Graph& h, GameParams p, Player human, std::istream& in,
                               std::ostream& out, std::size_t budget = kDefaultBudget);

} // namespace uag::game
