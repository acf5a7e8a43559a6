#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mnl {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclass onto its exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector/matrix shape disagreement.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A configuration or call parameter outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A value outside an operation's mathematical domain (negative variance,
/// negative squared deviation, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite loss or state encountered during training or evaluation.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Agent file and data/run settings do not fit together.
class CompatibilityError : public Error {
public:
    using Error::Error;
};

enum class DataErrorKind {
    missing_file,
    bad_header,
    malformed_row,
    duplicate_date,
    empty_series,
    insufficient_data,
    bad_format,
};

const char* to_string(DataErrorKind kind) noexcept;

/// Problems with input files or series lengths. `line()` is the 1-based
/// source line for row-level errors, 0 otherwise.
class DataError : public Error {
public:
    DataError(DataErrorKind kind, const std::string& what, std::size_t line = 0);

    [[nodiscard]] DataErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    DataErrorKind kind_;
    std::size_t line_;
};

}  // namespace mnl
