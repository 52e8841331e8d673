#include "pc/store/log.hpp"

#include "pc/error.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>

namespace pc::store {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 10> kEventNames{
    "widget_created", "widget_moved",   "option_added",    "value_set", "flow_started",
    "flow_completed", "flow_failed",    "revision_pushed", "reverted",  "workspace_event"};

[[noreturn]] void storage_error(const std::string& what, const std::filesystem::path& path) {
  throw Error(ErrorCode::storage_failure, what + " " + path.string() + ": " + std::strerror(errno),
              {{"path", path.string()}});
}

}  // namespace

std::string_view to_string(Actor actor) { return actor == Actor::user ? "user" : "system"; }

std::string_view to_string(LogEvent event) { return kEventNames[static_cast<std::size_t>(event)]; }

Actor actor_from_string(std::string_view s) {
  if (s == "user") return Actor::user;
  if (s == "system") return Actor::system;
  throw Error(ErrorCode::malformed_request, "unknown actor: " + std::string(s));
}

LogEvent log_event_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i) {
    if (kEventNames[i] == s) return static_cast<LogEvent>(i);
  }
  throw Error(ErrorCode::malformed_request, "unknown log event: " + std::string(s));
}

json to_json(const LogEntry& e) {
  return {{"timestamp", core::format_timestamp(e.timestamp)},
          {"workspace_id", e.workspace_id},
          {"actor", to_string(e.actor)},
          {"event", to_string(e.event)},
          {"detail", e.detail}};
}

LogEntry log_entry_from_json(const json& j) {
  try {
    LogEntry e;
    e.timestamp = core::parse_timestamp(j.at("timestamp").get<std::string>());
    e.workspace_id = j.at("workspace_id").get<std::string>();
    e.actor = actor_from_string(j.at("actor").get<std::string>());
    e.event = log_event_from_string(j.at("event").get<std::string>());
    const auto& detail = j.at("detail");
    if (!detail.is_object()) throw Error(ErrorCode::malformed_request, "log detail is not an object");
    e.detail = detail.get<LogDetail>();
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::malformed_request, std::string("malformed log entry: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw Error(ErrorCode::malformed_request, std::string("malformed log entry: ") + ex.what());
  }
}

InteractionLog::InteractionLog(std::filesystem::path path, bool sync)
    : path_(std::move(path)), sync_(sync) {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) storage_error("cannot open log", path_);
}

InteractionLog::~InteractionLog() {
  if (fd_ >= 0) ::close(fd_);
}

LogEntry InteractionLog::append(LogEntry entry) {
  std::lock_guard lock(mutex_);
  if (entry.timestamp < last_) entry.timestamp = last_;
  const auto line = to_json(entry).dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const auto n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      storage_error("cannot append to log", path_);
    }
    written += static_cast<std::size_t>(n);
  }
  if (sync_ && ::fdatasync(fd_) != 0) storage_error("cannot sync log", path_);
  last_ = entry.timestamp;
  return entry;
}

std::vector<LogEntry> InteractionLog::read_all() const {
  std::ifstream in(path_, std::ios::binary);
  std::vector<LogEntry> out;
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    const bool last_line = in.peek() == std::char_traits<char>::eof();
    if (line.empty()) continue;
    try {
      out.push_back(log_entry_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      if (last_line) continue;  // torn tail from an interrupted append
      throw Error(ErrorCode::storage_failure,
                  "corrupt log line " + std::to_string(out.size() + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<LogEntry> InteractionLog::read_for(std::string_view workspace_id) const {
  auto all = read_all();
  std::erase_if(all, [&](const LogEntry& e) { return e.workspace_id != workspace_id; });
  return all;
}

}  // namespace pc::store
