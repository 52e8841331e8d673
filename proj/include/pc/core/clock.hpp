#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace pc::core {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Clock = std::function<Timestamp()>;

Timestamp now();

/// RFC 3339 UTC with millisecond precision, e.g. 2024-05-01T12:30:00.250Z.
std::string format_timestamp(Timestamp t);

/// Inverse of format_timestamp. Throws std::invalid_argument on bad input.
Timestamp parse_timestamp(std::string_view s);

}  // namespace pc::core
