#include "pc/core/text.hpp"

namespace pc::core {
namespace {

constexpr bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string_view trim_view(std::string_view s) noexcept {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return s.substr(begin, end - begin);
}

std::string trim(std::string_view s) { return std::string(trim_view(s)); }

bool canonical_equal(std::string_view a, std::string_view b) noexcept {
  return trim_view(a) == trim_view(b);
}

bool is_blank(std::string_view s) noexcept { return trim_view(s).empty(); }

std::size_t word_count(std::string_view text) noexcept {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

}  // namespace pc::core
