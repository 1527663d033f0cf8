#include "uag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <boost/math/distributions/normal.hpp>

#include "uag/error.hpp"
#include "uag/rng.hpp"

namespace uag::harness {

Sentence make_sentence(std::string id, const std::string& text) {
    Sentence s;
    s.id = std::move(id);
    s.text = text;
    s.formula = fo::parse(text);
    s.gamma = fo::distinct_variables(s.formula);
    s.depth = fo::quantifier_depth(s.formula);
    return s;
}

std::size_t ExperimentConfig::effective_gamma_cap() const {
    if (gamma_cap) return gamma_cap;
    return m > 3 ? m - 2 : 1;
}

void ExperimentConfig::validate() const {
    if (m < 1) throw DomainError("m must be at least 1");
    if (replicates < 1) throw DomainError("replicates must be at least 1");
    if (!(confidence > 0 && confidence < 1)) throw DomainError("confidence must lie in (0, 1)");
    if (row_timeout < 0) throw DomainError("row timeout must be non-negative");
    for (auto n : ns)
        if (n < m) throw DomainError("n = " + std::to_string(n) + " is below m");
    std::set<std::string> ids;
    for (const auto& s : sentences) {
        if (s.id.empty() || s.id.find_first_of(",\"\r\n") != std::string::npos)
            throw DomainError("sentence id '" + s.id + "' is empty or contains a CSV metacharacter");
        if (!ids.insert(s.id).second) throw DomainError("duplicate sentence id " + s.id);
        if (!fo::is_sentence(s.formula)) throw DomainError("sentence " + s.id + " has free variables");
        if (!waive_gamma_cap && s.gamma > effective_gamma_cap())
            throw DomainError("sentence " + s.id + " uses " + std::to_string(s.gamma) +
                              " variables, above the cap " + std::to_string(effective_gamma_cap()) +
                              " (waive the cap to run it anyway)");
    }
}

bool EstimateRow::operator==(const EstimateRow& o) const {
    return n == o.n && sentence_id == o.sentence_id && trials == o.trials && successes == o.successes &&
           estimate == o.estimate && ci_low == o.ci_low && ci_high == o.ci_high;
}

Interval wilson(std::size_t successes, std::size_t trials, double confidence) {
    if (successes > trials) throw DomainError("successes exceed trials");
    if (trials == 0) return {0, 1};
    boost::math::normal_distribution<double> normal;
    double z = boost::math::quantile(normal, 1 - (1 - confidence) / 2);
    double n = double(trials), p = double(successes) / n, z2 = z * z;
    double denom = 1 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::clamp(std::min(center - half, p), 0.0, 1.0), std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

Graph replicate_graph(std::size_t n, std::size_t m, std::uint64_t seed, std::size_t i) {
    GrowthProcess proc(m, Rng::for_path(seed, {n, i}));
    proc.grow_to(n);
    return std::move(proc).take();
}

std::vector<EstimateRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t S = cfg.sentences.size(), R = cfg.replicates;
    std::vector<fo::Evaluator> evals;
    for (const auto& s : cfg.sentences) evals.emplace_back(s.formula);

    // outcome[(k * S + s) * R + i]: 0 unevaluated, 1 false, 2 true
    std::vector<unsigned char> outcome(cfg.ns.size() * S * R, 0);
    std::vector<double> spent(cfg.ns.size() * S, 0);
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    const std::size_t tasks = cfg.ns.size() * R;

    auto worker = [&] {
        for (std::size_t t; (t = next++) < tasks;) {
            std::size_t k = t / R, i = t % R;
            Graph g = replicate_graph(cfg.ns[k], cfg.m, cfg.seed, i);
            for (std::size_t s = 0; s < S; ++s) {
                std::size_t row = k * S + s;
                if (cfg.row_timeout > 0) {
                    std::lock_guard lock(mu);
                    if (spent[row] > cfg.row_timeout) continue;
                }
                auto t0 = std::chrono::steady_clock::now();
                bool v = evals[s](g);
                std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
                std::lock_guard lock(mu);
                outcome[row * R + i] = v ? 2 : 1;
                spent[row] += dt.count();
            }
        }
    };
    std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(tasks, 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<EstimateRow> rows;
    for (std::size_t k = 0; k < cfg.ns.size(); ++k)
        for (std::size_t s = 0; s < S; ++s) {
            EstimateRow r;
            r.n = cfg.ns[k];
            r.sentence_id = cfg.sentences[s].id;
            for (std::size_t i = 0; i < R; ++i) {
                auto o = outcome[(k * S + s) * R + i];
                r.trials += o != 0;
                r.successes += o == 2;
            }
            r.timed_out = r.trials < R;
            r.estimate = r.trials ? double(r.successes) / double(r.trials) : 0.0;
            auto ci = wilson(r.successes, r.trials, cfg.confidence);
            r.ci_low = ci.low;
            r.ci_high = ci.high;
            rows.push_back(std::move(r));
        }
    std::stable_sort(rows.begin(), rows.end(), [](const EstimateRow& a, const EstimateRow& b) {
        return std::tie(a.n, a.sentence_id) < std::tie(b.n, b.sentence_id);
    });
    return rows;
}

std::string format_number(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<EstimateRow>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows)
        out << std::to_string(r.n) + ',' + r.sentence_id + ',' + std::to_string(r.trials) + ',' +
                   std::to_string(r.successes) + ',' + format_number(r.estimate) + ',' + format_number(r.ci_low) +
                   ',' + format_number(r.ci_high) + '\n';
}

void emit_csv(const std::string& path, const std::vector<EstimateRow>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open " + path + " for writing");
    write_csv(f, rows);
    if (!f) throw DomainError("write to " + path + " failed");
}

namespace {

template <class T>
T parse_field(const std::string& s, std::size_t line) {
    T v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DomainError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

} // namespace

std::vector<EstimateRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw DomainError("csv: missing or unexpected header");
    std::vector<EstimateRow> rows;
    for (std::size_t ln = 2; std::getline(in, line); ++ln) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 7) throw DomainError("csv line " + std::to_string(ln) + ": expected 7 fields");
        EstimateRow r;
        r.n = parse_field<std::size_t>(f[0], ln);
        r.sentence_id = f[1];
        r.trials = parse_field<std::size_t>(f[2], ln);
        r.successes = parse_field<std::size_t>(f[3], ln);
        r.estimate = parse_field<double>(f[4], ln);
        r.ci_low = parse_field<double>(f[5], ln);
        r.ci_high = parse_field<double>(f[6], ln);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<EstimateRow> parse_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open " + path);
    return read_csv(f);
}

} // namespace uag::harness
