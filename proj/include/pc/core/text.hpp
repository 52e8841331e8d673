#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace pc::core {

/// Strips leading and trailing ASCII whitespace.
std::string_view trim_view(std::string_view s) noexcept;
std::string trim(std::string_view s);

/// Canonical equality used for every dedup rule: trim both sides, then
/// compare bytes (case-sensitive).
bool canonical_equal(std::string_view a, std::string_view b) noexcept;

bool is_blank(std::string_view s) noexcept;

/// Number of maximal runs of non-whitespace characters.
std::size_t word_count(std::string_view text) noexcept;

}  // namespace pc::core
