#pragma once

#include <stdexcept>
#include <string>

namespace uag {

// Bad input to a domain operation (out-of-range vertex, malformed file, ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : DomainError {
    ParseError(const std::string& what, std::size_t pos)
        : DomainError(what + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

// An exact search exceeded its configured budget.
struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The Duplicator strategy found no admissible reply.
struct ExhaustionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A strategy invariant failed after a reply was committed.
struct InvariantBreach : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace uag
