#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nearcorr {

enum class ErrorCode {
    invalid_argument = 1,
    dimension_mismatch,
    parse,
    asymmetric,
    convergence,
    degenerate_series,
    missing_data,
    insufficient_observations,
    non_positive_diagonal,
    generation,
};

/// Base of every exception thrown by the library. The code is what the C API
/// reports; the message is meant for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& message) : Error(ErrorCode::invalid_argument, message) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& message) : Error(ErrorCode::dimension_mismatch, message) {}
};

/// Row and column are 1-based positions in the source document (0 when unknown).
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t row, std::size_t column)
        : Error(ErrorCode::parse, message), row_(row), column_(column) {}
    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class AsymmetryError : public Error {
public:
    AsymmetryError(const std::string& message, double asymmetry)
        : Error(ErrorCode::asymmetric, message), asymmetry_(asymmetry) {}
    [[nodiscard]] double asymmetry() const noexcept { return asymmetry_; }

private:
    double asymmetry_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, double residual)
        : Error(ErrorCode::convergence, message), residual_(residual) {}
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class DegenerateSeries : public Error {
public:
    explicit DegenerateSeries(const std::string& message) : Error(ErrorCode::degenerate_series, message) {}
};

class MissingData : public Error {
public:
    explicit MissingData(const std::string& message) : Error(ErrorCode::missing_data, message) {}
};

class InsufficientObservations : public Error {
public:
    explicit InsufficientObservations(const std::string& message)
        : Error(ErrorCode::insufficient_observations, message) {}
};

class NonPositiveDiagonal : public Error {
public:
    NonPositiveDiagonal(const std::string& message, std::size_t index)
        : Error(ErrorCode::non_positive_diagonal, message), index_(index) {}
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class GenerationError : public Error {
public:
    explicit GenerationError(const std::string& message) : Error(ErrorCode::generation, message) {}
};

}  // namespace nearcorr
