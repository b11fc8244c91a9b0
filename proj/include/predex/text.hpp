#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace predex {

std::string_view trim(std::string_view s);

/// Whole-string decimal parse; rejects trailing garbage and non-finite results.
std::optional<double> parse_real(std::string_view text);

/// Shortest text that parses back to the same double.
std::string format_real(double value);

} // namespace predex
