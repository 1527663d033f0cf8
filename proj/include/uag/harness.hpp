#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "uag/fo.hpp"

namespace uag::harness {

struct Sentence {
    std::string id;
    std::string text;
    fo::Formula formula;
    std::size_t gamma = 0;  // distinct variables
    std::size_t depth = 0;  // quantifier depth
};

// Parses `text`; throws ParseError.
Sentence make_sentence(std::string id, const std::string& text);

struct ExperimentConfig {
    std::size_t m = 2;
    std::vector<std::size_t> ns;
    std::vector<Sentence> sentences;
    std::size_t replicates = 100;
    std::uint64_t seed = 0;
    double confidence = 0.95;
    std::size_t gamma_cap = 0;  // 0 means m - 2 (at least 1)
    bool waive_gamma_cap = false;
    double row_timeout = 0;  // seconds of evaluation per row; 0 disables
    std::size_t threads = 0; // 0 means hardware concurrency

    std::size_t effective_gamma_cap() const;
    // Throws DomainError.
    void validate() const;
};

struct EstimateRow {
    std::size_t n = 0;
    std::string sentence_id;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double estimate = 0;
    double ci_low = 0;
    double ci_high = 0;
    bool timed_out = false;  // not part of the CSV; trials < replicates there

    // Compares the CSV fields.
    bool operator==(const EstimateRow& o) const;
};

struct Interval {
    double low = 0;
    double high = 1;
};

// Wilson score interval; [0, 1] for zero trials.
Interval wilson(std::size_t successes, std::size_t trials, double confidence);

// Graph for replicate i at size n: G_{n,m} on stream (seed, n, i).
Graph replicate_graph(std::size_t n, std::size_t m, std::uint64_t seed, std::size_t i);

// Rows ordered by n, then sentence id. Each replicate graph is generated once
// and evaluated against every sentence.
std::vector<EstimateRow> run_experiment(const ExperimentConfig& cfg);

inline const char* kCsvHeader = "n,sentence_id,trials,successes,estimate,ci_low,ci_high";

// Shortest round-trip decimal, independent of the global locale.
std::string format_number(double x);

void write_csv(std::ostream& out, const std::vector<EstimateRow>& rows);
void emit_csv(const std::string& path, const std::vector<EstimateRow>& rows);
std::vector<EstimateRow> read_csv(std::istream& in);
std::vector<EstimateRow> parse_csv(const std::string& path);

} // namespace uag::harness
