#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace affectgate {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// "2026-10-14T05:47:00.123Z"
std::string format_iso8601(Timestamp ts);

// Accepts the format produced by format_iso8601, with or without the
// millisecond part. Throws DataError on anything else.
Timestamp parse_iso8601(std::string_view text);

Timestamp now_utc();

}  // namespace affectgate
