#include "predex/error.hpp"

namespace predex {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::schema: return "schema_error";
    case ErrorCode::configuration: return "configuration_error";
    case ErrorCode::evaluation: return "evaluation_error";
    case ErrorCode::algebra: return "algebra_error";
    case ErrorCode::syntax: return "syntax_error";
    case ErrorCode::import: return "import_error";
    case ErrorCode::undefined_influence: return "undefined_influence";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::numerical: return "numerical_error";
    case ErrorCode::no_explanation: return "no_explanation";
    case ErrorCode::usage: return "usage_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    }
    return "error";
}

ParseError::ParseError(std::size_t row, std::size_t column, const std::string& message)
    : Error(ErrorCode::parse,
            "row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + message),
      row_(row), column_(column) {}

SyntaxError::SyntaxError(std::size_t position, const std::string& message)
    : Error(ErrorCode::syntax, message + " at position " + std::to_string(position)),
      position_(position) {}

} // namespace predex
