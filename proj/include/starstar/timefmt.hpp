#pragma once

#include "starstar/model.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace starstar {

// Parses ISO-8601 date-times into milliseconds since the Unix epoch.
// Accepted: YYYY-MM-DD, YYYY-MM-DDTHH:MM[:SS[.fff...]] with an optional
// 'Z' or +HH:MM / -HH:MM offset (no offset means UTC). A space may replace
// the 'T'. Returns nullopt on anything else.
std::optional<Timestamp> parse_iso8601(std::string_view text);

// Plain integer or ISO-8601.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// YYYY-MM-DDTHH:MM:SS.mmmZ
std::string format_iso8601(Timestamp millis);

} // namespace starstar
