#include "pc/prompt/fence.hpp"

#include <algorithm>

namespace pc::prompt {

std::string choose_fence(std::string_view text) {
  std::size_t longest = 0;
  std::size_t run = 0;
  for (char c : text) {
    run = c == '"' ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  return std::string(std::max<std::size_t>(3, longest + 1), '"');
}

std::string fenced(std::string_view text) {
  const auto fence = choose_fence(text);
  std::string out;
  out.reserve(text.size() + 2 * fence.size() + 2);
  out += fence;
  out += '\n';
  out += text;
  out += '\n';
  out += fence;
  return out;
}

}  // namespace pc::prompt
