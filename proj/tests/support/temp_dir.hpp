#pragma once

#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace pc::testing {

/// Fresh directory, removed on destruction. Placed under $PC_TEST_TMPDIR,
/// else /dev/shm when present (ext4 flushes on rename-over, which makes
/// save-heavy tests slow), else the system temp dir.
class TempDir {
public:
  TempDir() {
    std::string pattern = (base() / "pc-test-XXXXXX").string();
    if (!::mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

private:
  static std::filesystem::path base() {
    if (const char* env = std::getenv("PC_TEST_TMPDIR"); env && *env) return env;
    std::error_code ec;
    if (std::filesystem::is_directory("/dev/shm", ec)) return "/dev/shm";
    return std::filesystem::temp_directory_path();
  }

  std::filesystem::path path_;
};

}  // namespace pc::testing
