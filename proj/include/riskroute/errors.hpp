#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riskroute {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed caller input: empty vectors, out-of-range values, missing fields.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// A record line that violates the file schema. Carries the 1-based line
/// number and the offending field name.
class SchemaError : public InvalidInputError {
public:
    SchemaError(std::size_t line, std::string field, const std::string& what)
        : InvalidInputError("line " + std::to_string(line) + ", field '" + field + "': " + what),
          line_(line),
          field_(std::move(field)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

/// alpha is too small for the sample size: even a zero-risk threshold cannot
/// satisfy the selection inequality. Reports the minimum feasible n.
class BudgetInfeasibleError : public Error {
public:
    BudgetInfeasibleError(double alpha, double loss_bound_b, std::size_t n, std::size_t min_n)
        : Error("budget infeasible: B/(n+1) = " + std::to_string(loss_bound_b / (double(n) + 1.0)) +
                " > alpha = " + std::to_string(alpha) + " at n = " + std::to_string(n) +
                "; need n >= " + std::to_string(min_n)),
          min_n_(min_n) {}

    std::size_t min_n() const noexcept { return min_n_; }

private:
    std::size_t min_n_;
};

/// Remote scorer unreachable after the configured retries.
class TransportError : public Error {
public:
    using Error::Error;
};

}  // namespace riskroute
