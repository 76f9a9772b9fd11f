#pragma once

#include <stdexcept>
#include <string>

namespace pathcent {

/// Base class for all recoverable library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text (path files, temporal CSV, model JSON).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    /// 1-based line number of the offending input line, 0 if not line-bound.
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Invalid argument or configuration value.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A bounded enumeration or computation would exceed its resource budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// A train/test split left one side empty; callers retry with a new
/// repetition index.
class SplitError : public Error {
public:
    using Error::Error;
};

/// The requested measure does not exist for the requested model class.
class UnsupportedMeasureError : public Error {
public:
    using Error::Error;
};

/// A linear solve failed or violated its residual tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A ranking evaluation was degenerate (single-class labels).
class EvaluationError : public Error {
public:
    using Error::Error;
};

}  // namespace pathcent
