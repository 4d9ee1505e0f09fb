#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative radius, x > y, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure did not reach its requested tolerance.
/// Carries the best value obtained so far.
class NumericFailure : public Error {
public:
    NumericFailure(const std::string& what, double partial)
        : Error(what), partial_(partial) {}
    double partial() const noexcept { return partial_; }

private:
    double partial_;
};

/// Invalid or incomplete configuration (schema violation, missing component).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A structural hypothesis of a derived object fails, e.g. a transform that
/// must be strictly monotone is not. Identifies the offending interval.
class StructuralError : public Error {
public:
    StructuralError(const std::string& what, double lo, double hi)
        : Error(what), lo_(lo), hi_(hi) {}
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// A hypothesis required by an operation is not met.
/// `code` is a stable machine-readable identifier of the failing hypothesis.
class PreconditionRejected : public Error {
public:
    PreconditionRejected(std::string code, std::string hypothesis, const std::string& what)
        : Error(what), code_(std::move(code)), hypothesis_(std::move(hypothesis)) {}
    const std::string& code() const noexcept { return code_; }
    const std::string& hypothesis() const noexcept { return hypothesis_; }

private:
    std::string code_;
    std::string hypothesis_;
};

/// Internal consistency check failed; indicates a solver bug rather than a
/// mathematical outcome.
class SolverDefect : public Error {
public:
    using Error::Error;
};

/// Iteration stalled. `history` holds the per-sweep change norms.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

}  // namespace blowup
