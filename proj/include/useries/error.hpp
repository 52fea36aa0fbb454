#pragma once

#include <stdexcept>
#include <string>

namespace useries {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (b <= 1, sigma <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative or adaptive procedure did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A root-bracketing scan found no sign change.
class NoRootError : public Error {
public:
    using Error::Error;
};

/// Evaluator parameters that cannot honour the requested accuracy.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

/// The planner cannot meet the requested tolerance.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

} // namespace useries
