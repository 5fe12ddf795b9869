#pragma once

#include <stdexcept>
#include <string>

namespace zo {

// Caller broke a precondition (bad argument, bad config).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Objective returned a non-finite value, or an iterate left the finite range.
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterates blew past the divergence guard.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A quantity the library computed itself failed its own consistency check.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

// Text-format parse failure; line is 1-based.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, long line_number)
        : std::runtime_error(msg + " (line " + std::to_string(line_number) + ")"),
          line(line_number) {}
    long line;
};

}  // namespace zo
