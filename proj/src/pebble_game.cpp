#include "uag/pebble_game.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "uag/error.hpp"

namespace uag::game {

char side_char(Side s) { return s == Side::G ? 'G' : 'H'; }

std::size_t StrategyTree::depth() const {
    std::size_t d = 0;
    for (auto& [v, sub] : replies)
        if (sub) d = std::max(d, sub->depth());
    return d + 1;
}

namespace {

bool pair_ok(const Graph& g, const Graph& h, const Placement& a, const Placement& b) {
    if ((a.g == b.g) != (a.h == b.h)) return false;
    if (a.g == b.g) return true;
    return g.adjacent(a.g, b.g) == h.adjacent(a.h, b.h);
}

Placement make_pair(const SpoilerMove& mv, Vertex reply) {
    return mv.side == Side::G ? Placement{mv.vertex, reply} : Placement{reply, mv.vertex};
}

void check_config(const GameConfig& cfg, const Graph& g, const Graph& h) {
    for (auto& p : cfg.pebbles) {
        if ((p.g == 0) != (p.h == 0)) throw DomainError("pebble placed on one graph only");
        if (p.placed()) {
            g.check_vertex(p.g);
            h.check_vertex(p.h);
        }
    }
}

} // namespace

bool partial_iso(const GameConfig& cfg, const Graph& g, const Graph& h) {
    check_config(cfg, g, h);
    auto& ps = cfg.pebbles;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!ps[i].placed()) continue;
        for (std::size_t j = i + 1; j < ps.size(); ++j)
            if (ps[j].placed() && !pair_ok(g, h, ps[i], ps[j])) return false;
    }
    return true;
}

GameConfig apply(const GameConfig& cfg, const SpoilerMove& mv, Vertex reply) {
    if (cfg.rounds_left == 0) throw DomainError("no rounds left");
    if (mv.pebble >= cfg.pebbles.size()) throw DomainError("pebble index out of range");
    GameConfig next = cfg;
    next.pebbles[mv.pebble] = make_pair(mv, reply);
    --next.rounds_left;
    return next;
}

Solver::Solver(const Graph& g, const Graph& h, GameParams p, std::size_t budget)
    : g_(g), h_(h), p_(p), budget_(budget) {
    if (p_.gamma == 0) throw DomainError("gamma must be at least 1");
}

std::size_t Solver::KeyHash::operator()(const std::vector<Vertex>& k) const {
    std::uint64_t x = 0x84222325cbf29ce4ull;
    for (Vertex v : k) x = (x ^ v) * 0x100000001b3ull;
    return static_cast<std::size_t>(x ^ (x >> 29));
}

std::vector<Vertex> Solver::key(const GameConfig& cfg) const {
    std::vector<Placement> placed;
    for (auto& p : cfg.pebbles)
        if (p.placed()) placed.push_back(p);
    std::sort(placed.begin(), placed.end());
    std::vector<Vertex> k;
    k.reserve(1 + 2 * placed.size());
    k.push_back(static_cast<Vertex>(cfg.rounds_left));
    for (auto& p : placed) {
        k.push_back(p.g);
        k.push_back(p.h);
    }
    return k;
}

std::vector<SpoilerMove> Solver::moves(const GameConfig& cfg) const {
    // one representative pebble per distinct placement (plus one unplaced)
    std::vector<std::size_t> reps;
    bool unplaced_seen = false;
    for (std::size_t i = 0; i < cfg.pebbles.size(); ++i) {
        auto& p = cfg.pebbles[i];
        if (!p.placed()) {
            if (!unplaced_seen) reps.push_back(i);
            unplaced_seen = true;
            continue;
        }
        bool dup = false;
        for (std::size_t j : reps)
            if (cfg.pebbles[j] == p) dup = true;
        if (!dup) reps.push_back(i);
    }
    std::vector<SpoilerMove> out;
    for (Side s : {Side::G, Side::H})
        for (std::size_t i : reps)
            for (Vertex v = 1; v <= graph(s).order(); ++v) out.push_back({s, i, v});
    return out;
}

bool Solver::compatible(const GameConfig& cfg, const SpoilerMove& mv, Vertex reply) const {
    Placement np = make_pair(mv, reply);
    for (std::size_t i = 0; i < cfg.pebbles.size(); ++i)
        if (i != mv.pebble && cfg.pebbles[i].placed() && !pair_ok(g_, h_, np, cfg.pebbles[i])) return false;
    return true;
}

bool Solver::spoiler_wins(const GameConfig& cfg) {
    if (cfg.rounds_left == 0) return false;
    auto k = key(cfg);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    bool win = false;
    for (auto& mv : moves(cfg)) {
        const Graph& reply_graph = graph(other(mv.side));
        bool refuted = false;
        for (Vertex w = 1; w <= reply_graph.order() && !refuted; ++w) {
            if (!compatible(cfg, mv, w)) continue;
            if (!spoiler_wins(apply(cfg, mv, w))) refuted = true;
        }
        if (!refuted) {
            win = true;
            break;
        }
    }
    if (memo_.size() >= budget_)
        throw ResourceLimit("pebble game memo exceeded " + std::to_string(budget_) + " entries");
    memo_.emplace(std::move(k), win);
    return win;
}

std::optional<SpoilerMove> Solver::winning_move(const GameConfig& cfg) {
    if (cfg.rounds_left == 0) return std::nullopt;
    for (auto& mv : moves(cfg)) {
        const Graph& reply_graph = graph(other(mv.side));
        bool refuted = false;
        for (Vertex w = 1; w <= reply_graph.order() && !refuted; ++w)
            if (compatible(cfg, mv, w) && !spoiler_wins(apply(cfg, mv, w))) refuted = true;
        if (!refuted) return mv;
    }
    return std::nullopt;
}

std::size_t Solver::survival(const GameConfig& cfg) {
    GameConfig c = cfg;
    while (c.rounds_left > 0 && spoiler_wins(c)) --c.rounds_left;
    return c.rounds_left;
}

std::shared_ptr<const StrategyTree> Solver::build_witness(const GameConfig& cfg) {
    auto mv = winning_move(cfg);
    if (!mv) return nullptr;
    auto tree = std::make_shared<StrategyTree>();
    tree->move = *mv;
    const Graph& reply_graph = graph(other(mv->side));
    for (Vertex w = 1; w <= reply_graph.order(); ++w) {
        if (!compatible(cfg, *mv, w)) {
            tree->replies.emplace_back(w, nullptr);
            continue;
        }
        tree->replies.emplace_back(w, build_witness(apply(cfg, *mv, w)));
    }
    return tree;
}

GameOutcome Solver::solve(const GameConfig& start, bool want_witness) {
    if (start.pebbles.size() != p_.gamma) throw DomainError("configuration has wrong pebble count");
    if (!partial_iso(start, g_, h_)) {
        if (start.rounds_left != 0) throw DomainError("start configuration is not alive");
        return {Player::Spoiler, nullptr};
    }
    GameOutcome out;
    out.winner = spoiler_wins(start) ? Player::Spoiler : Player::Duplicator;
    if (out.winner == Player::Spoiler && want_witness) out.witness = build_witness(start);
    return out;
}

GameOutcome solve(const Graph& g, const Graph& h, GameParams p, const GameConfig& start, std::size_t budget) {
    Solver s(g, h, p, budget);
    return s.solve(start);
}

bool spoiler_wins_naive(const Graph& g, const Graph& h, const GameConfig& cfg) {
    if (cfg.rounds_left == 0) return false;
    for (std::size_t p = 0; p < cfg.pebbles.size(); ++p)
        for (Side s : {Side::H, Side::G}) {
            const Graph& mine = s == Side::G ? g : h;
            const Graph& theirs = s == Side::G ? h : g;
            for (Vertex v = mine.order(); v >= 1; --v) {
                bool duplicator_escapes = false;
                for (Vertex w = 1; w <= theirs.order() && !duplicator_escapes; ++w) {
                    GameConfig next = apply(cfg, {s, p, v}, w);
                    duplicator_escapes = partial_iso(next, g, h) && !spoiler_wins_naive(g, h, next);
                }
                if (!duplicator_escapes) return true;
            }
        }
    return false;
}

Reply Solver::best_reply(const GameConfig& cfg, const SpoilerMove& mv) {
    const Graph& reply_graph = graph(other(mv.side));
    graph(mv.side).check_vertex(mv.vertex);
    // same label first, then ascending
    std::vector<Vertex> order;
    if (mv.vertex <= reply_graph.order()) order.push_back(mv.vertex);
    for (Vertex w = 1; w <= reply_graph.order(); ++w)
        if (w != mv.vertex) order.push_back(w);
    Reply best;
    best.vertex = order.empty() ? 0 : order.front();
    bool have = false;
    for (Vertex w : order) {
        if (!compatible(cfg, mv, w)) continue;
        GameConfig next = apply(cfg, mv, w);
        if (!spoiler_wins(next)) return {w, true, true, next.rounds_left};
        std::size_t surv = survival(next);
        if (!have || surv > best.survival) {
            best = {w, false, true, surv};
            have = true;
        }
    }
    return best;
}

Reply duplicator_best_reply(const Graph& g, const Graph& h, GameParams p, const GameConfig& cfg,
                            const SpoilerMove& mv, std::size_t budget) {
    Solver s(g, h, p, budget);
    return s.best_reply(cfg, mv);
}

bool equivalence_check(const Graph& g, const Graph& h, std::size_t gamma, std::size_t rounds, std::size_t budget) {
    Solver s(g, h, {gamma, rounds}, budget);
    return s.solve(GameConfig::empty(gamma, rounds), false).winner == Player::Duplicator;
}

std::string Transcript::str() const {
    std::ostringstream os;
    for (auto& l : lines) os << l.round << ' ' << side_char(l.side) << ' ' << l.pebble << ' ' << l.vertex << '\n';
    if (winner) os << "winner " << (*winner == Player::Spoiler ? "spoiler" : "duplicator") << '\n';
    return os.str();
}

Transcript interactive_session(const Graph& g, const Graph& h, GameParams p, Player human, std::istream& in,
                               std::ostream& out, std::size_t budget) {
    Solver solver(g, h, p, budget);
    Transcript tr;
    GameConfig cfg = GameConfig::empty(p.gamma, p.rounds);
    auto read_line = [&](std::string& line) {
        if (!std::getline(in, line)) return false;
        return true;
    };
    for (std::size_t r = 1; r <= p.rounds; ++r) {
        SpoilerMove mv;
        if (human == Player::Spoiler) {
            for (;;) {
                out << "round " << r << " spoiler (pebble side vertex)> " << std::flush;
                std::string line;
                if (!read_line(line)) return tr;
                std::istringstream ls(line);
                std::string word;
                ls >> word;
                if (word == "quit") return tr;
                std::size_t peb = 0;
                char sc = 0;
                long long v = 0;
                std::istringstream ps(line);
                if (!(ps >> peb >> sc >> v) || peb < 1 || peb > p.gamma || (sc != 'G' && sc != 'H')) {
                    out << "expected: pebble (1.." << p.gamma << ") side (G|H) vertex\n";
                    continue;
                }
                Side s = sc == 'G' ? Side::G : Side::H;
                if (v < 1 || static_cast<std::size_t>(v) > solver.graph(s).order()) {
                    out << "vertex out of range\n";
                    continue;
                }
                mv = {s, peb - 1, static_cast<Vertex>(v)};
                break;
            }
        } else {
            auto win = solver.winning_move(cfg);
            mv = win ? *win : solver.moves(cfg).front();
        }
        tr.lines.push_back({r, mv.side, mv.pebble + 1, mv.vertex});
        if (human == Player::Spoiler) out << "spoiler: " << tr.lines.back().pebble << ' ' << side_char(mv.side) << ' ' << mv.vertex << '\n';

        Vertex reply = 0;
        Side rs = other(mv.side);
        if (human == Player::Duplicator) {
            out << "spoiler moved pebble " << mv.pebble + 1 << " to " << side_char(mv.side) << ' ' << mv.vertex
                << '\n';
            for (;;) {
                out << "round " << r << " duplicator (vertex in " << side_char(rs) << ")> " << std::flush;
                std::string line;
                if (!read_line(line)) return tr;
                std::istringstream ls(line);
                std::string word;
                ls >> word;
                if (word == "quit") return tr;
                long long v = 0;
                std::istringstream vs(line);
                if (!(vs >> v) || v < 1 || static_cast<std::size_t>(v) > solver.graph(rs).order()) {
                    out << "expected a vertex of " << side_char(rs) << '\n';
                    continue;
                }
                reply = static_cast<Vertex>(v);
                break;
            }
        } else {
            reply = solver.best_reply(cfg, mv).vertex;
            out << "duplicator: " << side_char(rs) << ' ' << reply << '\n';
        }
        tr.lines.push_back({r, rs, mv.pebble + 1, reply});
        cfg = apply(cfg, mv, reply);
        if (!partial_iso(cfg, g, h)) {
            tr.winner = Player::Spoiler;
            out << "pebbled subgraphs differ: spoiler wins\n";
            return tr;
        }
    }
    tr.winner = Player::Duplicator;
    out << "duplicator survived " << p.rounds << " rounds\n";
    return tr;
}

} // namespace uag::game
