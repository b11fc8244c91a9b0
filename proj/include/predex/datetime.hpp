#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace predex {

/// Parses ISO-8601 date or date-time text into UTC epoch seconds. Accepts `YYYY-MM-DD`,
/// `YYYY-MM-DD[ T]HH:MM[:SS[.fraction]]` and an optional `Z` or `+HH:MM` suffix.
/// Fractional seconds are truncated toward the earlier second.
std::optional<std::int64_t> parse_iso8601(std::string_view text);

/// `YYYY-MM-DD HH:MM:SS` in UTC.
std::string format_iso8601(std::int64_t epoch_seconds);

} // namespace predex
