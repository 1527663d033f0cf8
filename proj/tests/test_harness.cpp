#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>

#include <json.hpp>

#include "uag/cli.hpp"
#include "uag/error.hpp"
#include "uag/graph.hpp"
#include "uag/harness.hpp"

using namespace uag;
using namespace uag::harness;

namespace {

ExperimentConfig base_config(std::size_t m, std::vector<std::size_t> ns, std::size_t reps = 30) {
    ExperimentConfig c;
    c.m = m;
    c.ns = std::move(ns);
    c.replicates = reps;
    c.seed = 11;
    c.threads = 1;
    c.waive_gamma_cap = true;
    return c;
}

std::string csv_of(const std::vector<EstimateRow>& rows) {
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

const EstimateRow& row(const std::vector<EstimateRow>& rows, std::size_t n, const std::string& id) {
    for (const auto& r : rows)
        if (r.n == n && r.sentence_id == id) return r;
    FAIL("missing row");
    return rows.front();
}

struct CommaDecimal : std::numpunct<char> {
    char do_decimal_point() const override { return ','; }
    char do_thousands_sep() const override { return '.'; }
    std::string do_grouping() const override { return "\3"; }
};

struct Cli {
    int code = 0;
    std::string out, err;
};

Cli run_cli(std::vector<std::string> args, const std::string& input = "") {
    args.insert(args.begin(), "uag");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::istringstream in(input);
    std::ostringstream out, err;
    Cli r;
    r.code = cli::run(int(argv.size()), argv.data(), in, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / ("uag_harness_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string operator/(const std::string& f) const { return (path / f).string(); }
};

} // namespace

TEST_CASE("wilson interval") {
    auto a = wilson(0, 10, 0.95);
    CHECK(a.low == 0.0);
    CHECK(a.high == doctest::Approx(0.27753).epsilon(1e-4));
    auto b = wilson(5, 10, 0.95);
    CHECK(b.low == doctest::Approx(0.23659).epsilon(1e-4));
    CHECK(b.high == doctest::Approx(0.76341).epsilon(1e-4));
    auto c = wilson(10, 10, 0.95);
    CHECK(c.high == 1.0);
    CHECK(c.low == doctest::Approx(0.72247).epsilon(1e-4));
    auto z = wilson(0, 0, 0.95);
    CHECK(z.low == 0.0);
    CHECK(z.high == 1.0);
    CHECK(wilson(3, 10, 0.99).high > wilson(3, 10, 0.9).high);
    CHECK_THROWS_AS(wilson(4, 3, 0.95), DomainError);
}

TEST_CASE("tautology and impossible sentences") {
    auto c = base_config(1, {8, 16, 32});
    c.sentences = {make_sentence("taut", "Ex.(x=x)"), make_sentence("tri", "Ex.Ey.Ez.(x~y & y~z & z~x)")};
    auto rows = run_experiment(c);
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) {
        CHECK(r.trials == 30);
        CHECK(r.ci_low <= r.estimate);
        CHECK(r.estimate <= r.ci_high);
        CHECK(r.estimate == (r.sentence_id == "taut" ? 1.0 : 0.0));
    }
}

TEST_CASE("gamma cap") {
    auto c = base_config(4, {10});
    c.waive_gamma_cap = false;
    c.sentences = {make_sentence("tri", "Ex.Ey.Ez.(x~y & y~z & z~x)")};
    CHECK(c.effective_gamma_cap() == 2);
    CHECK_THROWS_AS(run_experiment(c), DomainError);
    c.gamma_cap = 3;
    CHECK(run_experiment(c).size() == 1);
    c.gamma_cap = 0;
    c.waive_gamma_cap = true;
    CHECK(run_experiment(c).front().estimate == 1.0);  // K4 seed

    c.sentences = {make_sentence("a", "Ex.(x=x)"), make_sentence("a", "Ex.(x=x)")};
    CHECK_THROWS_AS(run_experiment(c), DomainError);
    c.sentences = {make_sentence("a,b", "Ex.(x=x)")};
    CHECK_THROWS_AS(run_experiment(c), DomainError);
    c.sentences = {make_sentence("a", "Ex.(x=x)")};
    c.replicates = 0;
    CHECK_THROWS_AS(run_experiment(c), DomainError);
}

TEST_CASE("logical relations between estimates") {
    auto c = base_config(2, {6, 10, 20}, 60);
    const std::string phi = "Ex.Ay.(x=y | x~y)";  // a dominating vertex
    const std::string psi = "Ex.Ey.(x~y & Ax.(x=y | x~y))";
    c.sentences = {make_sentence("phi", phi),
                   make_sentence("not_phi", "!(" + phi + ")"),
                   make_sentence("psi", psi),
                   make_sentence("phi_or_psi", "(" + phi + ") | (" + psi + ")"),
                   make_sentence("phi_and_psi", "(" + phi + ") & (" + psi + ")")};
    auto rows = run_experiment(c);
    for (std::size_t n : c.ns) {
        CHECK(row(rows, n, "phi").successes + row(rows, n, "not_phi").successes == 60);
        CHECK(row(rows, n, "phi").estimate + row(rows, n, "not_phi").estimate == 1.0);
        CHECK(row(rows, n, "phi_and_psi").estimate <= row(rows, n, "phi").estimate);
        CHECK(row(rows, n, "phi_and_psi").estimate <= row(rows, n, "psi").estimate);
        CHECK(row(rows, n, "phi").estimate <= row(rows, n, "phi_or_psi").estimate);
        CHECK(row(rows, n, "psi").estimate <= row(rows, n, "phi_or_psi").estimate);
    }
    // a dominating vertex exists at n = m + 1 and fades later
    CHECK(row(rows, 6, "phi").estimate > row(rows, 20, "phi").estimate);
}

TEST_CASE("rows are ordered and stable under grid changes") {
    auto c = base_config(2, {40, 10, 20});
    c.sentences = {make_sentence("b", "Ex.Ey.(x~y & Ax.(x=y | x~y))"), make_sentence("a", "Ax.Ey.(x~y)")};
    auto rows = run_experiment(c);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].n == 10);
    CHECK(rows[0].sentence_id == "a");
    CHECK(rows[1].sentence_id == "b");
    CHECK(rows[5].n == 40);

    auto wider = c;
    wider.ns = {5, 10, 20, 40, 80};
    auto more = run_experiment(wider);
    for (const auto& r : rows) CHECK(row(more, r.n, r.sentence_id) == r);

    // replicate i at size n is the same graph whatever the grid
    CHECK(replicate_graph(20, 2, 11, 3) == replicate_graph(20, 2, 11, 3));
    CHECK_FALSE(replicate_graph(20, 2, 11, 3) == replicate_graph(20, 2, 11, 4));
}

TEST_CASE("determinism across runs and thread counts") {
    auto c = base_config(3, {16, 32}, 25);
    c.sentences = {make_sentence("s1", "Ex.Ey.(x~y & Ax.(x~y -> Ey.(x~y & !Ex.(x~y & !x=y & Ay.(x=y)))))"),
                   make_sentence("s2", "Ax.Ey.(x~y & Ex.(x~y & !x=y))")};
    auto one = csv_of(run_experiment(c));
    CHECK(one == csv_of(run_experiment(c)));
    c.threads = 3;
    CHECK(one == csv_of(run_experiment(c)));
}

TEST_CASE("per-row timeouts are recorded") {
    auto c = base_config(2, {400}, 12);
    c.row_timeout = 1e-12;
    c.sentences = {make_sentence("slow", "Ax.Ay.(x=y | x~y | Ex.(x~y))"), make_sentence("taut", "Ex.(x=x)")};
    auto rows = run_experiment(c);
    for (const auto& r : rows) {
        CHECK(r.timed_out);
        CHECK(r.trials >= 1);
        CHECK(r.trials < 12);
        CHECK(r.ci_low <= r.estimate);
        CHECK(r.estimate <= r.ci_high);
    }
}

TEST_CASE("csv emission") {
    TempDir dir;
    SUBCASE("empty rows give a header-only file") {
        emit_csv(dir / "empty.csv", {});
        std::ifstream f(dir / "empty.csv");
        std::stringstream ss;
        ss << f.rdbuf();
        CHECK(ss.str() == std::string(kCsvHeader) + "\n");
        CHECK(parse_csv(dir / "empty.csv").empty());
    }
    SUBCASE("round trip") {
        auto c = base_config(2, {12, 24}, 17);
        c.sentences = {make_sentence("dom", "Ex.Ay.(x=y | x~y)"), make_sentence("edge", "Ex.Ey.(x~y)")};
        auto rows = run_experiment(c);
        rows.push_back({1234567, "big", 3, 1, 1.0 / 3.0, 0.0123456789, 0.987654321});
        emit_csv(dir / "rows.csv", rows);
        CHECK(parse_csv(dir / "rows.csv") == rows);
        emit_csv(dir / "again.csv", parse_csv(dir / "rows.csv"));
        std::ifstream a(dir / "rows.csv"), b(dir / "again.csv");
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
    }
    SUBCASE("locale independent") {
        std::vector<EstimateRow> rows{{1048576, "x", 1000, 250, 0.25, 0.2, 0.3}};
        auto plain = csv_of(rows);
        auto old = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
        std::ostringstream os;
        write_csv(os, rows);
        std::locale::global(old);
        CHECK(os.str() == plain);
        CHECK(plain.find("1048576,x,1000,250,0.25,0.2,0.3") != std::string::npos);
    }
    SUBCASE("malformed input") {
        std::istringstream bad_header("n,id\n");
        CHECK_THROWS_AS(read_csv(bad_header), DomainError);
        std::istringstream bad_row(std::string(kCsvHeader) + "\n1,a,2,1,x,0,1\n");
        CHECK_THROWS_AS(read_csv(bad_row), DomainError);
        CHECK_THROWS_AS(parse_csv(dir / "missing.csv"), DomainError);
    }
}

TEST_CASE("command line") {
    TempDir dir;
    auto g = dir / "g.txt";
    auto gen = run_cli({"gen", "--n", "100", "--m", "2", "--seed", "7", "-o", g});
    CHECK(gen.code == 0);
    CHECK(load_graph(g).order() == 100);
    CHECK(load_graph(g) == generate({100, 2, 7}));

    auto ev = run_cli({"eval", "--graph", g, "--sentence", "Ex.Ey.(x~y)"});
    CHECK(ev.code == 0);
    CHECK(ev.out == "true\n");
    CHECK(run_cli({"eval", "--graph", g, "--sentence", "Ex.Ay.(x~y)"}).out == "false\n");

    CHECK(run_cli({"eval", "--graph", g, "--sentence", "x", "--frobnicate"}).code == 2);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"launch"}).code == 2);
    CHECK(run_cli({"eval", "--graph", g, "--sentence", "Ex.(x~"}).code == 1);
    CHECK(run_cli({"eval", "--graph", dir / "nope.txt", "--sentence", "Ex.(x=x)"}).code == 1);
    for (std::string sub : {"gen", "eval", "game", "play", "trim", "props", "duel", "experiment"}) {
        auto h = run_cli({sub, "--help"});
        CHECK(h.code == 0);
        CHECK(h.out.find("Usage") != std::string::npos);
    }
}

TEST_CASE("command line experiment is deterministic") {
    TempDir dir;
    std::vector<std::string> args{"experiment", "--m", "2", "--n", "16,32", "--sentence", "Ex.(x=x)",
                                  "--sentence", "dom:Ex.Ay.(x=y | x~y)", "--replicates", "10",
                                  "--seed", "5", "--waive-gamma-cap"};
    auto a = args, b = args;
    a.insert(a.end(), {"-o", dir / "a.csv"});
    b.insert(b.end(), {"-o", dir / "b.csv"});
    REQUIRE(run_cli(a).code == 0);
    REQUIRE(run_cli(b).code == 0);
    std::ifstream fa(dir / "a.csv"), fb(dir / "b.csv");
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    auto rows = parse_csv(dir / "a.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].sentence_id == "dom");
    CHECK(rows[1].sentence_id == "s1");

    auto capped = args;
    capped.pop_back();
    CHECK(run_cli(capped).code == 1);
}

TEST_CASE("command line props report") {
    TempDir dir;
    auto r = run_cli({"props", "--n", "300", "--m", "2", "--a", "3", "--n0", "2", "--N0", "6", "--K", "1", "--seeds",
                      "4", "--seed", "1", "--csv", dir / "p.csv"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["params"]["n"] == 300);
    CHECK(j["seeds"].size() == 4);
    for (const auto& s : j["seeds"]) {
        CHECK(s.contains("q1_violations"));
        CHECK(s["all"] == (s["q1"].get<bool>() && s["q2"].get<bool>() && s["q3"].get<bool>()));
    }
    CHECK(j["summary"]["all_rate"].get<double>() >= 0.0);
    std::ifstream f(dir / "p.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "seed_index,q1,q2,q3,all");

    auto grid = run_cli({"props", "--n", "300", "--m", "2", "--seeds", "2", "--grid", "1:4,2:8"});
    REQUIRE(grid.code == 0);
    CHECK(nlohmann::json::parse(grid.out)["grid"].size() == 2);
    CHECK(run_cli({"props", "--n", "300", "--grid", "1-4"}).code == 2);
}

TEST_CASE("play session") {
    TempDir dir;
    // a path and a triangle-free star look alike for one round, not for two
    save_graph(dir / "p.txt", Graph::from_edges(4, {{1, 2}, {2, 3}, {3, 4}}));
    save_graph(dir / "s.txt", Graph::from_edges(4, {{1, 2}, {1, 3}, {1, 4}}));
    std::vector<std::string> base{"play", "--g", dir / "p.txt", "--h", dir / "s.txt", "--gamma", "2", "--rounds", "2"};

    SUBCASE("scripted replay reproduces the transcript") {
        const std::string script = "1 H 1\n2 H 2\n";
        auto a = run_cli(base, script), b = run_cli(base, script);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        CHECK(a.out.find("machine: exact solver") != std::string::npos);
        CHECK(a.out.find("1 H 1 1") != std::string::npos);
        CHECK(a.out.find("winner") != std::string::npos);
    }
    SUBCASE("illegal input is re-prompted") {
        auto r = run_cli(base, "1 H 9\n3 G 1\nhello\n1 H 1\nquit\n");
        CHECK(r.code == 0);
        auto prompts = 0;
        for (std::size_t p = 0; (p = r.out.find("round 1 spoiler", p)) != std::string::npos; ++p) ++prompts;
        CHECK(prompts == 4);
        CHECK(r.out.find("1 H 1 1") != std::string::npos);
        CHECK(r.out.find("winner") == std::string::npos);
    }
    SUBCASE("heuristic fallback is labelled") {
        auto args = base;
        args.insert(args.end(), {"--budget", "1"});
        auto r = run_cli(args, "1 G 2\nquit\n");
        CHECK(r.code == 0);
        CHECK(r.out.find("heuristic") != std::string::npos);
        CHECK(r.out.find("1 G 1 2") != std::string::npos);
        auto d = args;
        d.insert(d.end(), {"--human", "duplicator"});
        auto r2 = run_cli(d, "0\n1\n1\n");
        CHECK(r2.code == 0);
        CHECK(r2.out.find("expected a vertex") != std::string::npos);
    }
}

TEST_CASE("command line duel and trim") {
    TempDir dir;
    auto ctx = dir / "ctx";
    REQUIRE(run_cli({"gen", "--synthetic", "--R", "1", "--m", "4", "--n0", "1", "--N0", "2", "--seed", "3", "-o", ctx})
                .code == 0);
    auto r = run_cli({"duel", "--ctx", ctx + "/context.json", "--spoiler", "random", "--trials", "30"});
    CHECK(r.code == 0);
    CHECK(r.out.find("games 30 duplicator_wins 30") != std::string::npos);
    auto e = run_cli({"duel", "--ctx", ctx + "/context.json", "--spoiler", "exhaustive"});
    CHECK(e.code == 0);
    CHECK(e.out.find("winner duplicator") != std::string::npos);
    CHECK(run_cli({"duel", "--spoiler", "random"}).code == 2);
    CHECK(run_cli({"duel", "--synthetic", "--R", "1", "--rounds", "2"}).code == 1);

    std::ofstream(dir / "t.txt") << "4\n2 1\n3 1\n4 1\n";
    auto t = run_cli({"trim", "--tree", dir / "t.txt", "--a", "2"});
    CHECK(t.code == 0);
    CHECK(t.out.rfind("3\n", 0) == 0);
    CHECK(t.out.find("trivial yes") != std::string::npos);
}
