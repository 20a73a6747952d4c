#pragma once

#include <stdexcept>
#include <string>

namespace rebal {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file content. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class WindowError : public Error {
public:
    using Error::Error;
};

class AllocationError : public Error {
public:
    using Error::Error;
};

class InsolvencyError : public Error {
public:
    using Error::Error;
};

/// Input outside the domain of a computation (non-positive price, empty series).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A metric is mathematically undefined on the given sample (zero variance,
/// zero drawdown, empty tail). Reported as not-computable, never as inf/NaN.
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace rebal
