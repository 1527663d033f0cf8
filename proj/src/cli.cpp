#include "uag/cli.hpp"

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uag/canonical.hpp"
#include "uag/error.hpp"
#include "uag/fo.hpp"
#include "uag/harness.hpp"
#include "uag/pebble_game.hpp"
#include "uag/strategy.hpp"
#include "uag/structure.hpp"

namespace uag::cli {

namespace {

using game::Side;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
    const char* s = std::getenv("UAG_SEED");
    if (!s || !*s) return 0;
    char* end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (errno || *end || *s == '-') throw UsageError(std::string("UAG_SEED is not a non-negative integer: ") + s);
    return v;
}

std::ostream* open_out(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return &fallback;
    file.open(path, std::ios::binary);
    if (!file) throw DomainError("cannot open " + path + " for writing");
    return &file;
}

// Options shared by subcommands that build a synthetic context.
struct SyntheticOpts {
    std::size_t R = 1, m = 4, n0 = 1, N0 = 2, copies = 0;
};

void add_synthetic(CLI::App* sub, SyntheticOpts& o) {
    sub->add_option("--R", o.R, "rounds parameter (cycle lengths up to 3^R)")->capture_default_str();
    sub->add_option("--m", o.m, "edges per vertex; pebbles = m - 2")->capture_default_str();
    sub->add_option("--n0", o.n0, "core size")->capture_default_str();
    sub->add_option("--N0", o.N0, "extended core size")->capture_default_str();
    sub->add_option("--copies", o.copies, "planted cycles per length (0: m)")->capture_default_str();
}

strategy::SyntheticSpec spec_of(const SyntheticOpts& o, std::uint64_t seed) {
    strategy::SyntheticSpec s;
    s.R = o.R;
    s.m = o.m;
    s.n0 = o.n0;
    s.N0 = o.N0;
    s.copies = o.copies;
    s.seed = seed;
    return s;
}

Side parse_side(const std::string& s) {
    if (s == "G" || s == "g") return Side::G;
    if (s == "H" || s == "h") return Side::H;
    throw DomainError("side must be G or H");
}

// Reply that keeps the pebbles a partial isomorphism, preferring equal degree.
Vertex heuristic_reply(const Graph& g, const Graph& h, const game::GameConfig& cfg, const game::SpoilerMove& mv) {
    const Graph& from = mv.side == Side::G ? g : h;
    const Graph& to = mv.side == Side::G ? h : g;
    std::size_t want = from.degree(mv.vertex);
    Vertex best = 1;
    std::size_t best_gap = kInfinity;
    for (Vertex c = 1; c <= to.order(); ++c) {
        if (!game::partial_iso(game::apply(cfg, mv, c), g, h)) continue;
        std::size_t d = to.degree(c), gap = d > want ? d - want : want - d;
        if (gap < best_gap) best = c, best_gap = gap;
    }
    return best;
}

// Best-effort play when neither the solver nor the strategy applies.
game::Transcript heuristic_session(const Graph& g, const Graph& h, game::GameParams p, game::Player human,
                                   std::uint64_t seed, std::istream& in, std::ostream& out) {
    game::Transcript tr;
    auto cfg = game::GameConfig::empty(p.gamma, p.rounds);
    Rng rng(seed);
    for (std::size_t r = 1; r <= p.rounds; ++r) {
        game::SpoilerMove mv;
        Vertex reply = 0;
        if (human == game::Player::Spoiler) {
            for (;;) {
                out << "round " << r << " spoiler (pebble side vertex)> " << std::flush;
                std::string line;
                if (!std::getline(in, line) || line == "quit") return tr;
                std::istringstream ls(line);
                std::size_t peb = 0;
                std::string side;
                Vertex v = 0;
                if (!(ls >> peb >> side >> v) || peb < 1 || peb > p.gamma || (side != "G" && side != "H")) {
                    out << "expected: pebble(1.." << p.gamma << ") G|H vertex\n";
                    continue;
                }
                Side s = parse_side(side);
                if (!(s == Side::G ? g : h).contains(v)) {
                    out << "vertex out of range\n";
                    continue;
                }
                mv = {s, peb - 1, v};
                break;
            }
            reply = heuristic_reply(g, h, cfg, mv);
        } else {
            Side s = rng.below(2) ? Side::H : Side::G;
            const Graph& gs = s == Side::G ? g : h;
            mv = {s, std::size_t(rng.below(p.gamma)), Vertex(1 + rng.below(gs.order()))};
            out << "spoiler places pebble " << mv.pebble + 1 << " on " << game::side_char(s) << ' ' << mv.vertex
                << '\n';
            const Graph& other = s == Side::G ? h : g;
            for (;;) {
                out << "round " << r << " duplicator (vertex)> " << std::flush;
                std::string line;
                if (!std::getline(in, line) || line == "quit") return tr;
                std::istringstream ls(line);
                if (!(ls >> reply) || !other.contains(reply)) {
                    out << "expected a vertex of " << game::side_char(game::other(s)) << '\n';
                    continue;
                }
                break;
            }
        }
        tr.lines.push_back({r, mv.side, mv.pebble + 1, mv.vertex});
        tr.lines.push_back({r, game::other(mv.side), mv.pebble + 1, reply});
        if (human == game::Player::Spoiler) out << "reply " << reply << '\n';
        cfg = game::apply(cfg, mv, reply);
        if (!game::partial_iso(cfg, g, h)) {
            tr.winner = game::Player::Spoiler;
            return tr;
        }
    }
    tr.winner = game::Player::Duplicator;
    return tr;
}

nlohmann::json report_json(const structure::StructureReport& rep) {
    nlohmann::json j;
    j["q1"] = rep.q1.pass;
    j["q2"] = rep.q2.pass;
    j["q3"] = rep.q3.pass;
    j["all"] = rep.pass();
    nlohmann::json viol = nlohmann::json::array();
    for (const auto& v : rep.q1.violations)
        viol.push_back({{"clause", v.clause}, {"cycle", v.cycle}, {"cycle2", v.cycle2}, {"path", v.path}});
    j["q1_violations"] = viol;
    nlohmann::json counts = nlohmann::json::object();
    for (std::size_t b = 3; b < rep.q2.counts.size(); ++b) counts[std::to_string(b)] = rep.q2.counts[b];
    j["q2_counts"] = counts;
    j["q3_offending"] = rep.q3.offending;
    return j;
}

std::vector<structure::GridPoint> parse_grid(const std::string& text) {
    std::vector<structure::GridPoint> grid;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw UsageError("grid entries are n0:N0, got '" + item + "'");
        try {
            grid.push_back({std::stoul(item.substr(0, colon)), std::stoul(item.substr(colon + 1))});
        } catch (const std::logic_error&) {
            throw UsageError("grid entries are n0:N0, got '" + item + "'");
        }
    }
    return grid;
}

harness::Sentence sentence_arg(const std::string& arg, std::size_t index) {
    auto colon = arg.find(':');
    if (colon != std::string::npos && colon > 0 && arg.find_first_of(".(~", 0) > colon)
        return harness::make_sentence(arg.substr(0, colon), arg.substr(colon + 1));
    return harness::make_sentence("s" + std::to_string(index), arg);
}

} // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Uniform attachment graphs: generation, logic, pebble games and convergence experiments", "uag"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.fallthrough(false);

    std::uint64_t seed = 0;
    try {
        seed = default_seed();
    } catch (const UsageError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }
    std::function<int()> action;

    // gen
    auto* gen = app.add_subcommand("gen", "Sample a uniform attachment graph or build a synthetic match context");
    std::size_t gen_n = 0, gen_m = 1;
    std::string gen_out;
    bool gen_synth = false;
    SyntheticOpts gen_so;
    gen->add_option("--n", gen_n, "number of vertices");
    gen->add_option("--m,--edges", gen_m, "edges per new vertex")->capture_default_str();
    gen->add_option("--seed", seed, "seed (default: UAG_SEED or 0)");
    gen->add_option("-o,--out", gen_out, "graph file, or directory with --synthetic")->required();
    gen->add_flag("--synthetic", gen_synth, "write a synthetic context (h1.txt, h2.txt, context.json)");
    gen->add_option("--R", gen_so.R, "synthetic: rounds parameter")->capture_default_str();
    gen->add_option("--n0", gen_so.n0, "synthetic: core size")->capture_default_str();
    gen->add_option("--N0", gen_so.N0, "synthetic: extended core size")->capture_default_str();
    gen->add_option("--copies", gen_so.copies, "synthetic: planted cycles per length (0: m)");
    gen->callback([&] {
        action = [&] {
            if (gen_synth) {
                gen_so.m = gen_m;
                auto ctx = strategy::synthetic_context(spec_of(gen_so, seed));
                std::filesystem::create_directories(gen_out);
                auto dir = std::filesystem::path(gen_out);
                save_graph((dir / "h1.txt").string(), ctx.h1());
                save_graph((dir / "h2.txt").string(), ctx.h2());
                strategy::save_context((dir / "context.json").string(), ctx, "h1.txt", "h2.txt");
                out << "context " << (dir / "context.json").string() << " order " << ctx.h1().order() << ' '
                    << ctx.h2().order() << '\n';
                return kExitOk;
            }
            if (gen_n == 0) throw UsageError("--n is required");
            save_graph(gen_out, generate({gen_n, gen_m, seed}));
            return kExitOk;
        };
    });

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluate a first-order sentence on a graph");
    std::string ev_graph, ev_sentence;
    ev->add_option("--graph", ev_graph, "graph file")->required();
    ev->add_option("--sentence", ev_sentence, "sentence, e.g. \"Ex.Ey.(x~y)\"")->required();
    ev->callback([&] {
        action = [&] {
            auto g = load_graph(ev_graph);
            auto f = fo::parse(ev_sentence);
            out << (fo::evaluate(f, g) ? "true" : "false") << '\n';
            return kExitOk;
        };
    });

    // game
    auto* gm = app.add_subcommand("game", "Solve the pebble game between two graphs");
    std::string gm_g, gm_h;
    game::GameParams gm_p{2, 2};
    std::size_t gm_budget = game::kDefaultBudget;
    bool gm_witness = false;
    gm->add_option("--g", gm_g, "first graph file")->required();
    gm->add_option("--h", gm_h, "second graph file")->required();
    gm->add_option("--gamma", gm_p.gamma, "pebble pairs")->capture_default_str();
    gm->add_option("--rounds", gm_p.rounds, "rounds")->capture_default_str();
    gm->add_option("--budget", gm_budget, "memo entries before giving up")->capture_default_str();
    gm->add_flag("--witness", gm_witness, "print a Spoiler winning strategy's first move");
    gm->callback([&] {
        action = [&] {
            auto g = load_graph(gm_g), h = load_graph(gm_h);
            auto res = game::solve(g, h, gm_p, game::GameConfig::empty(gm_p.gamma, gm_p.rounds), gm_budget);
            bool sp = res.winner == game::Player::Spoiler;
            out << "winner " << (sp ? "spoiler" : "duplicator") << '\n';
            if (sp && gm_witness && res.witness) {
                const auto& mv = res.witness->move;
                out << "first move " << mv.pebble + 1 << ' ' << game::side_char(mv.side) << ' ' << mv.vertex
                    << " (strategy depth " << res.witness->depth() << ")\n";
            }
            return kExitOk;
        };
    });

    // play
    auto* pl = app.add_subcommand("play", "Play the pebble game interactively against the machine");
    std::string pl_g, pl_h, pl_ctx, pl_human = "spoiler";
    game::GameParams pl_p{2, 2};
    std::size_t pl_budget = 2'000'000;
    pl->add_option("--g", pl_g, "first graph file");
    pl->add_option("--h", pl_h, "second graph file");
    pl->add_option("--ctx", pl_ctx, "match context file; enables the Duplicator strategy");
    pl->add_option("--gamma", pl_p.gamma, "pebble pairs")->capture_default_str();
    pl->add_option("--rounds", pl_p.rounds, "rounds")->capture_default_str();
    pl->add_option("--human", pl_human, "side you play")->check(CLI::IsMember({"spoiler", "duplicator"}))
        ->capture_default_str();
    pl->add_option("--budget", pl_budget, "solver memo budget")->capture_default_str();
    pl->add_option("--seed", seed, "seed for the heuristic Spoiler");
    pl->callback([&] {
        action = [&] {
            std::optional<strategy::MatchContext> ctx;
            Graph g, h;
            if (!pl_ctx.empty()) {
                ctx.emplace(strategy::load_context(pl_ctx));
                g = ctx->h1();
                h = ctx->h2();
            } else {
                if (pl_g.empty() || pl_h.empty()) throw UsageError("give --g and --h, or --ctx");
                g = load_graph(pl_g);
                h = load_graph(pl_h);
            }
            auto human = pl_human == "spoiler" ? game::Player::Spoiler : game::Player::Duplicator;
            bool solvable = true;
            try {
                game::Solver s(g, h, pl_p, pl_budget);
                s.solve(game::GameConfig::empty(pl_p.gamma, pl_p.rounds), false);
            } catch (const ResourceLimit&) {
                solvable = false;
            }
            if (solvable) {
                out << "machine: exact solver\n";
                out << game::interactive_session(g, h, pl_p, human, in, out, pl_budget).str();
                return kExitOk;
            }
            if (ctx && human == game::Player::Spoiler && pl_p.gamma <= ctx->pebbles() && pl_p.rounds <= ctx->R() &&
                strategy::validate_context(*ctx).ok) {
                out << "machine: duplicator strategy\n";
                strategy::Duplicator dup(*ctx);
                strategy::StreamSpoiler sp(in, out);
                out << strategy::duel(dup, sp, pl_p.rounds).transcript();
                return kExitOk;
            }
            out << "machine: heuristic (best effort, not optimal)\n";
            out << heuristic_session(g, h, pl_p, human, seed, in, out).str();
            return kExitOk;
        };
    });

    // trim
    auto* tr = app.add_subcommand("trim", "Trim a rooted tree and print its canonical code");
    std::string tr_tree;
    std::size_t tr_a = 1;
    tr->add_option("--tree", tr_tree, "tree file")->required();
    tr->add_option("--a", tr_a, "representatives kept per class")->required();
    tr->callback([&] {
        action = [&] {
            std::ifstream f(tr_tree);
            if (!f) throw DomainError("cannot open " + tr_tree);
            auto t = canon::read_tree(f);
            auto trimmed = canon::trim(t, tr_a);
            canon::write_tree(out, trimmed);
            std::ostringstream hex;
            for (unsigned char c : canon::canon_code(t, tr_a).bytes)
                hex << "0123456789abcdef"[c >> 4] << "0123456789abcdef"[c & 15];
            out << "code " << hex.str() << '\n';
            out << "trivial " << (canon::a_trivial(t, tr_a) ? "yes" : "no") << '\n';
            return kExitOk;
        };
    });

    // props
    auto* pr = app.add_subcommand("props", "Check the structural properties Q1-Q3 across seeds");
    structure::SearchConfig pr_c;
    std::size_t pr_n0 = 1, pr_N0 = 1;
    std::string pr_json, pr_csv, pr_grid, pr_form = "n0+m";
    pr->add_option("--n", pr_c.n, "graph order")->required();
    pr->add_option("--m", pr_c.m, "edges per vertex")->capture_default_str();
    pr->add_option("--a", pr_c.a, "cycle length bound")->capture_default_str();
    pr->add_option("--n0", pr_n0, "core size")->capture_default_str();
    pr->add_option("--N0", pr_N0, "extended core size")->capture_default_str();
    pr->add_option("--K", pr_c.K, "cycle supply threshold")->capture_default_str();
    pr->add_option("--seeds", pr_c.seeds, "number of graphs")->capture_default_str();
    pr->add_option("--seed", seed, "base seed");
    pr->add_option("--q3", pr_form, "core degree bound")->check(CLI::IsMember({"n0+m", "K"}))->capture_default_str();
    pr->add_option("--grid", pr_grid, "search mode: comma separated n0:N0 pairs");
    pr->add_option("--json", pr_json, "JSON report path (default stdout)");
    pr->add_option("--csv", pr_csv, "per-seed CSV path");
    pr->callback([&] {
        action = [&] {
            pr_c.base_seed = seed;
            pr_c.q3_form = pr_form == "K" ? structure::Q3Form::AtLeastK : structure::Q3Form::AtLeastN0PlusM;
            nlohmann::json rep;
            rep["params"] = {{"n", pr_c.n},   {"m", pr_c.m},         {"a", pr_c.a},         {"K", pr_c.K},
                             {"q3", pr_form}, {"seeds", pr_c.seeds}, {"seed", pr_c.base_seed}};
            if (!pr_grid.empty()) {
                pr_c.grid = parse_grid(pr_grid);
                nlohmann::json rows = nlohmann::json::array();
                for (const auto& r : structure::search_parameters(pr_c))
                    rows.push_back({{"n0", r.point.n0}, {"N0", r.point.N0}, {"trials", r.trials}, {"q1", r.q1},
                                    {"q2", r.q2},       {"q3", r.q3},       {"all", r.all}});
                rep["grid"] = rows;
            } else {
                structure::StructureParams p;
                p.a = pr_c.a;
                p.n0 = pr_n0;
                p.N0 = pr_N0;
                p.K = pr_c.K;
                p.m = pr_c.m;
                p.q3_form = pr_c.q3_form;
                p.validate();
                rep["params"]["n0"] = pr_n0;
                rep["params"]["N0"] = pr_N0;
                std::ofstream csv_file;
                std::ostream* csv = pr_csv.empty() ? nullptr : open_out(pr_csv, csv_file, out);
                if (csv) *csv << "seed_index,q1,q2,q3,all\n";
                nlohmann::json seeds = nlohmann::json::array();
                std::size_t q1 = 0, q2 = 0, q3 = 0, all = 0;
                for (std::size_t i = 0; i < pr_c.seeds; ++i) {
                    auto g = harness::replicate_graph(pr_c.n, pr_c.m, pr_c.base_seed, i);
                    auto r = structure::check_all(g, p);
                    auto j = report_json(r);
                    j["index"] = i;
                    seeds.push_back(j);
                    q1 += r.q1.pass, q2 += r.q2.pass, q3 += r.q3.pass, all += r.pass();
                    if (csv)
                        *csv << i << ',' << int(r.q1.pass) << ',' << int(r.q2.pass) << ',' << int(r.q3.pass) << ','
                             << int(r.pass()) << '\n';
                }
                double k = pr_c.seeds ? double(pr_c.seeds) : 1.0;
                rep["summary"] = {{"q1", q1},     {"q2", q2},     {"q3", q3},     {"all", all},
                                  {"q1_rate", q1 / k}, {"q2_rate", q2 / k}, {"q3_rate", q3 / k}, {"all_rate", all / k}};
                rep["seeds"] = seeds;
            }
            std::ofstream jf;
            *open_out(pr_json, jf, out) << rep.dump(2) << '\n';
            return kExitOk;
        };
    });

    // duel
    auto* du = app.add_subcommand("duel", "Pit the Duplicator strategy against a Spoiler");
    std::string du_ctx, du_spoiler = "random";
    std::size_t du_rounds = 0, du_trials = 100;
    std::uint64_t du_budget = 10'000'000;
    bool du_synth = false, du_verbose = false;
    SyntheticOpts du_so;
    du->add_option("--ctx", du_ctx, "match context file");
    du->add_flag("--synthetic", du_synth, "build a synthetic context instead of loading one");
    add_synthetic(du, du_so);
    du->add_option("--spoiler", du_spoiler, "Spoiler policy")
        ->check(CLI::IsMember({"random", "adversarial", "exhaustive", "human"}))
        ->capture_default_str();
    du->add_option("--rounds", du_rounds, "rounds (default R)");
    du->add_option("--trials", du_trials, "games for random/adversarial")->capture_default_str();
    du->add_option("--budget", du_budget, "exhaustive: answered moves before giving up")->capture_default_str();
    du->add_option("--seed", seed, "seed");
    du->add_flag("-v,--verbose", du_verbose, "print every transcript");
    du->callback([&] {
        action = [&] {
            if (du_ctx.empty() == !du_synth) throw UsageError("give exactly one of --ctx and --synthetic");
            std::optional<strategy::MatchContext> ctx;
            if (du_synth) {
                ctx.emplace(strategy::synthetic_context(spec_of(du_so, seed)));
            } else {
                ctx.emplace(strategy::load_context(du_ctx));
                auto v = strategy::validate_context(*ctx);
                if (!v.ok) {
                    for (const auto& f : v.failures) err << "context: " << f << '\n';
                    throw DomainError("context does not satisfy the strategy hypotheses");
                }
            }
            std::size_t rounds = du_rounds ? du_rounds : ctx->R();
            strategy::Duplicator dup(*ctx);
            out << "context order " << ctx->h1().order() << ' ' << ctx->h2().order() << " pebbles " << ctx->pebbles()
                << " rounds " << rounds << '\n';
            if (du_spoiler == "exhaustive") {
                auto res = strategy::exhaustive_spoiler(dup, rounds, du_budget);
                out << "positions " << res.positions << '\n';
                out << "winner " << (res.duplicator_won ? "duplicator" : "spoiler") << '\n';
                if (!res.duplicator_won) {
                    strategy::DuelResult d{false, res.counterexample, res.error};
                    out << d.transcript();
                }
                return kExitOk;
            }
            if (du_spoiler == "human") {
                strategy::StreamSpoiler sp(in, out);
                out << strategy::duel(dup, sp, rounds).transcript();
                return kExitOk;
            }
            std::size_t won = 0;
            for (std::size_t i = 0; i < du_trials; ++i) {
                Rng rng = Rng::for_path(seed, {i});
                std::unique_ptr<strategy::SpoilerPolicy> sp;
                if (du_spoiler == "random")
                    sp = std::make_unique<strategy::RandomSpoiler>(rng);
                else
                    sp = std::make_unique<strategy::AdversarialSpoiler>(rng);
                auto res = strategy::duel(dup, *sp, rounds);
                won += res.duplicator_won;
                if (du_verbose || !res.duplicator_won) out << "# game " << i << '\n' << res.transcript();
            }
            out << "games " << du_trials << " duplicator_wins " << won << '\n';
            return kExitOk;
        };
    });

    // experiment
    auto* ex = app.add_subcommand("experiment", "Estimate sentence probabilities over an n grid");
    harness::ExperimentConfig ex_c;
    std::vector<std::size_t> ex_ns;
    std::vector<std::string> ex_sent;
    std::string ex_file, ex_out;
    ex->add_option("--m", ex_c.m, "edges per vertex")->capture_default_str();
    ex->add_option("--n", ex_ns, "graph orders")->required()->delimiter(',');
    ex->add_option("--sentence", ex_sent, "sentence, optionally prefixed by 'id:'");
    ex->add_option("--sentences", ex_file, "file with one sentence per line ('#' comments)");
    ex->add_option("--replicates", ex_c.replicates, "graphs per n")->capture_default_str();
    ex->add_option("--seed", seed, "base seed");
    ex->add_option("--confidence", ex_c.confidence, "Wilson interval level")->capture_default_str();
    ex->add_option("--gamma-cap", ex_c.gamma_cap, "variable cap (default m - 2)");
    ex->add_flag("--waive-gamma-cap", ex_c.waive_gamma_cap, "allow sentences above the cap");
    ex->add_option("--timeout", ex_c.row_timeout, "seconds of evaluation per row (0: none)");
    ex->add_option("--threads", ex_c.threads, "worker threads (0: all cores)");
    ex->add_option("-o,--out", ex_out, "CSV path (default stdout)");
    ex->callback([&] {
        action = [&] {
            ex_c.ns = ex_ns;
            ex_c.seed = seed;
            std::size_t idx = 1;
            for (const auto& s : ex_sent) ex_c.sentences.push_back(sentence_arg(s, idx++));
            if (!ex_file.empty()) {
                std::ifstream f(ex_file);
                if (!f) throw DomainError("cannot open " + ex_file);
                for (std::string line; std::getline(f, line);) {
                    if (line.empty() || line[0] == '#') continue;
                    ex_c.sentences.push_back(sentence_arg(line, idx++));
                }
            }
            if (ex_c.sentences.empty()) throw UsageError("no sentences given");
            auto rows = harness::run_experiment(ex_c);
            for (const auto& r : rows)
                if (r.timed_out)
                    err << "timeout: n=" << r.n << " sentence " << r.sentence_id << " evaluated " << r.trials << " of "
                        << ex_c.replicates << '\n';
            std::ofstream f;
            harness::write_csv(*open_out(ex_out, f, out), rows);
            return kExitOk;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    try {
        return action ? action() : kExitUsage;
    } catch (const UsageError& e) {
        err << "usage: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const ResourceLimit& e) {
        err << "resource limit: " << e.what() << '\n';
        return kExitDomain;
    } catch (const ExhaustionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::ios_base::failure& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitDomain;
    }
}

} // namespace uag::cli
