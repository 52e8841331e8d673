#pragma once

#include <string>
#include <string_view>

namespace pc::prompt {

/// Shortest run of double quotes (at least three) that does not occur in
/// `text`.
std::string choose_fence(std::string_view text);

/// Puts `text` between fence lines: FENCE \n text \n FENCE.
std::string fenced(std::string_view text);

}  // namespace pc::prompt
