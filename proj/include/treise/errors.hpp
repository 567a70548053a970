#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treise {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied data that violates a precondition (shape mismatch,
/// non-finite values, empty input, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// A generation/engine spec with out-of-range parameters.
class InvalidSpecError : public Error {
public:
    using Error::Error;
};

/// Requested capability the object does not provide (e.g. gradients).
class UnsupportedOperationError : public Error {
public:
    using Error::Error;
};

/// Malformed external data. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    explicit ParseError(const std::string& msg) : Error(msg), line_(0) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Filesystem / stream failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Artifact container rejected: bad magic, version, checksum or an
/// invariant violation discovered while loading.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Bad run configuration (unknown key, unparsable value, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace treise
