#pragma once

#include "pc/core/clock.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace pc::store {

enum class Actor { user, system };

enum class LogEvent {
  widget_created,
  widget_moved,
  option_added,
  value_set,
  flow_started,
  flow_completed,
  flow_failed,
  revision_pushed,
  reverted,
  workspace_event,
};

/// Detail payloads are JSON objects by construction.
using LogDetail = nlohmann::json::object_t;

struct LogEntry {
  core::Timestamp timestamp{};
  std::string workspace_id;
  Actor actor = Actor::user;
  LogEvent event = LogEvent::workspace_event;
  LogDetail detail;

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

std::string_view to_string(Actor actor);
std::string_view to_string(LogEvent event);
Actor actor_from_string(std::string_view s);
LogEvent log_event_from_string(std::string_view s);

nlohmann::json to_json(const LogEntry& entry);
LogEntry log_entry_from_json(const nlohmann::json& j);

/// Append-only JSON-lines file. Each entry is written with a single
/// write(2) on an O_APPEND descriptor, so concurrent writers (threads or
/// processes) never interleave within a line.
class InteractionLog {
public:
  /// With `sync` off, appends skip fdatasync (tests and benchmarks).
  explicit InteractionLog(std::filesystem::path path, bool sync = true);
  ~InteractionLog();
  InteractionLog(const InteractionLog&) = delete;
  InteractionLog& operator=(const InteractionLog&) = delete;

  /// Timestamps are clamped so that they never decrease within this log
  /// instance. Returns the entry as written. Throws Error(storage_failure).
  LogEntry append(LogEntry entry);

  /// All entries in file order. A torn final line (crash mid-append) is
  /// skipped; any other unparseable line throws Error(storage_failure).
  std::vector<LogEntry> read_all() const;
  std::vector<LogEntry> read_for(std::string_view workspace_id) const;

  const std::filesystem::path& path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
  int fd_ = -1;
  bool sync_ = true;
  std::mutex mutex_;
  core::Timestamp last_{};
};

}  // namespace pc::store
