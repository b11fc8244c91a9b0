#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace predex {

enum class ErrorCode {
    parse,               // malformed CSV / score file
    empty_input,
    schema,              // unknown feature, bad schema hint
    configuration,
    evaluation,          // predicate cannot be evaluated on a dataset
    algebra,             // merge/intersect preconditions
    syntax,              // predicate grammar
    import,              // score import
    undefined_influence,
    insufficient_data,
    numerical,
    no_explanation,
    usage,
    not_found,
    conflict,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// CSV parse failure. Rows and columns are 1-based as a spreadsheet user would count them,
/// the header being row 1.
class ParseError : public Error {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& message);

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// Predicate grammar failure; position is a 0-based byte offset into the input text.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, const std::string& message);

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class NumericalError : public Error {
public:
    NumericalError(double residual, const std::string& message)
        : Error(ErrorCode::numerical, message), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace predex
