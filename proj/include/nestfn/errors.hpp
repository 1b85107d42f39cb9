#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nestfn {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid parameter values at construction (range violations, non-finite).
struct InvalidParameter : Error {
    using Error::Error;
};

// Nonpositive or non-finite K/L (and other evaluation-domain violations).
struct DomainError : Error {
    using Error::Error;
};

// The outer bracket (or the inner aggregate feeding it) is not positive,
// so the power -1/p cannot be taken. Reachable when sigma > 1 or delta > 1.
struct NonPositiveBracket : Error {
    explicit NonPositiveBracket(const std::string& msg, double bracket_value = 0.0,
                                long long row_index = -1)
        : Error(msg), bracket(bracket_value), row(row_index) {}
    double bracket;
    long long row;  // offending panel row, -1 when not row-indexed
};

// A marginal product is zero within tolerance; MRTS-based quantities undefined.
struct ZeroMarginalProduct : Error {
    using Error::Error;
};

// Parameters do not satisfy the defining constraint of a special-case form.
struct FormMismatch : Error {
    using Error::Error;
};

// A finite-difference stencil left the evaluable domain, or a result overflowed.
struct NumericalBreakdown : Error {
    using Error::Error;
};

// grid*grid + samples exceeds the configured scan budget.
struct ScanBudgetExceeded : Error {
    using Error::Error;
};

struct TooFewObservations : Error {
    using Error::Error;
};

// Every multistart local search hit domain errors; no feasible point was seen.
struct AllStartsFailed : Error {
    using Error::Error;
};

// CSV ingestion errors. Lines are 1-based (line 1 is the header),
// columns are 1-based field positions.
struct HeaderMismatch : Error {
    using Error::Error;
};

struct RowParseError : Error {
    RowParseError(const std::string& msg, std::size_t line_number, std::size_t column_number)
        : Error(msg), line(line_number), column(column_number) {}
    std::size_t line;
    std::size_t column;
};

struct NonPositiveValue : Error {
    NonPositiveValue(const std::string& msg, std::size_t line_number)
        : Error(msg), line(line_number) {}
    std::size_t line;
};

// synth_panel exhausted its retry budget without finding evaluable draws.
struct UnsatisfiableRegion : Error {
    using Error::Error;
};

}  // namespace nestfn
