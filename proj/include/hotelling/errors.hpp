#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hotelling {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The parameters violate U(a) >= k / lambda, so exploring at zero reserves is never worthwhile.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

/// A query falls outside the solved grid, or the grid itself is malformed.
class GridError : public Error {
public:
    using Error::Error;
};

/// g(x, R) - c never changes sign on the reserve grid.
class FrontierNotBracketed : public Error {
public:
    using Error::Error;
};

/// The computed frontier increased with unexplored area by more than the tolerance.
class NonMonotoneFrontier : public Error {
public:
    using Error::Error;
};

/// A scalar root could not be bracketed.
class NoRoot : public Error {
public:
    using Error::Error;
};

/// An iterative scheme failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A simulation state was asked to do something only valid in the other region.
class RegionError : public Error {
public:
    using Error::Error;
};

class TimeOutOfRange : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Command-line or configuration values are inconsistent with the requested command.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Configuration text could not be parsed; carries the offending line (0 when not line-specific).
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0, std::string field = {})
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace hotelling
