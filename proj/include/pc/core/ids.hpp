#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <string>

namespace pc::core {

/// Version-4 UUID from a process-wide entropy source.
std::string random_uuid();

/// Thread-safe UUID v4 source. Seeded instances yield a reproducible sequence.
class IdGenerator {
public:
  explicit IdGenerator(std::optional<std::uint64_t> seed = std::nullopt);

  std::string next();

private:
  std::mutex mutex_;
  std::mt19937_64 engine_;
};

bool is_uuid_v4(const std::string& s);

}  // namespace pc::core
