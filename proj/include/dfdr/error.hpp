#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dfdr {

/// Base of every error raised by the library. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a domain invariant (duplicate IDs, p-value out of range, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

class PreprocessError : public Error {
public:
    using Error::Error;
};

/// An estimate is undefined for the given data, e.g. no null statistic below lambda.
class EstimationError : public Error {
public:
    using Error::Error;
};

/// Invalid option combination or parameter value.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace dfdr
