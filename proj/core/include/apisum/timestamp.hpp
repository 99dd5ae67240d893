#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace apisum {

// UTC instant with millisecond resolution (the Stack Exchange dump stores
// CreationDate as "2015-01-01T12:34:56.789").
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" with optional ".fff" and an
// optional trailing "Z". Returns false on anything else.
bool try_parse_timestamp(std::string_view text, Timestamp& out);

// Throws apisum::Error on invalid input.
Timestamp parse_timestamp(std::string_view text);

// Last millisecond of the given calendar day; used for inclusive "--to" dates.
Timestamp end_of_day(Timestamp t);

// Canonical form "YYYY-MM-DDTHH:MM:SS.fff".
std::string format_timestamp(Timestamp t);

Timestamp from_unix_seconds(long long seconds);
long long to_unix_seconds(Timestamp t);

}  // namespace apisum
