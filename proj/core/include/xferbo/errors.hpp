#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xferbo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A surrogate could not be trained (Cholesky failure at maximum nugget, all starts failed).
class TrainingError : public Error {
public:
    using Error::Error;
};

/// A blackbox evaluation failed. `row()` is the DOE row (or iteration) at which it happened.
class EvaluationError : public Error {
public:
    EvaluationError(std::size_t row, const std::string& cause)
        : Error("evaluation failed at row " + std::to_string(row) + ": " + cause), row_(row), cause_(cause) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& cause() const noexcept { return cause_; }

private:
    std::size_t row_;
    std::string cause_;
};

/// Source and target design spaces share no variable.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration, manifest or data file.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace xferbo
