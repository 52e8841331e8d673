#include "pc/core/ids.hpp"

#include <array>
#include <fmt/format.h>

namespace pc::core {
namespace {

std::string format_uuid(std::uint64_t hi, std::uint64_t lo) {
  hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;  // version 4
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;  // RFC 4122 variant
  return fmt::format("{:08x}-{:04x}-{:04x}-{:04x}-{:012x}", hi >> 32,
                     (hi >> 16) & 0xFFFF, hi & 0xFFFF, lo >> 48,
                     lo & 0xFFFFFFFFFFFFULL);
}

std::mt19937_64 seeded_from_device() {
  std::random_device rd;
  std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
  return std::mt19937_64(seq);
}

}  // namespace

std::string random_uuid() {
  thread_local std::mt19937_64 engine = seeded_from_device();
  const auto hi = engine();
  const auto lo = engine();
  return format_uuid(hi, lo);
}

IdGenerator::IdGenerator(std::optional<std::uint64_t> seed)
    : engine_(seed ? std::mt19937_64(*seed) : seeded_from_device()) {}

std::string IdGenerator::next() {
  std::lock_guard lock(mutex_);
  const auto hi = engine_();
  const auto lo = engine_();
  return format_uuid(hi, lo);
}

bool is_uuid_v4(const std::string& s) {
  if (s.size() != 36) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (c != '-') return false;
    } else if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
      return false;
    }
  }
  const char variant = s[19];
  return s[14] == '4' &&
         (variant == '8' || variant == '9' || variant == 'a' || variant == 'b');
}

}  // namespace pc::core
