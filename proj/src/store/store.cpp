#include "pc/store/store.hpp"

#include "pc/core/text.hpp"
#include "pc/error.hpp"
#include "pc/store/serialization.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pc::store {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const WorkspaceSummary& s) {
  return {{"id", s.id},
          {"name", s.name},
          {"widget_count", s.widget_count},
          {"created_at", core::format_timestamp(s.created_at)},
          {"modified_at", core::format_timestamp(s.modified_at)}};
}

WorkspaceSummary summarize(const core::Workspace& ws) {
  return {ws.id, ws.name, ws.widgets.size(), ws.created_at, ws.modified_at};
}

// ---- FileStorage ----

namespace {

[[noreturn]] void io_failure(const std::string& what, const fs::path& path) {
  throw Error(ErrorCode::storage_failure, what + " " + path.string() + ": " + std::strerror(errno),
              {{"path", path.string()}});
}

void write_all(int fd, const std::string& data, const fs::path& path) {
  std::size_t done = 0;
  while (done < data.size()) {
    const auto n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_failure("cannot write", path);
    }
    done += static_cast<std::size_t>(n);
  }
}

void sync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

[[noreturn]] void unknown(std::string_view id) {
  throw Error(ErrorCode::unknown_workspace, "no workspace with id '" + std::string(id) + "'",
              {{"workspace_id", std::string(id)}});
}

}  // namespace

FileStorage::FileStorage(fs::path dir, bool sync) : dir_(std::move(dir)), sync_(sync) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) {
    throw Error(ErrorCode::storage_failure, "cannot create " + dir_.string() + ": " + ec.message());
  }
}

fs::path FileStorage::file_for(const std::string& id) const { return dir_ / (id + ".json"); }

std::optional<core::Workspace> FileStorage::read(const std::string& id) const {
  if (!core::is_uuid_v4(id)) return std::nullopt;
  std::ifstream in(file_for(id), std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return workspace_from_json(json::parse(buf.str()));
  } catch (const std::exception& e) {
    throw Error(ErrorCode::storage_failure, "corrupt workspace file " + file_for(id).string() + ": " + e.what());
  }
}

void FileStorage::write(const core::Workspace& ws) {
  if (!core::is_uuid_v4(ws.id)) {
    throw Error(ErrorCode::malformed_request, "workspace id is not a UUID: " + ws.id);
  }
  const auto target = file_for(ws.id);
  const auto tmp = fs::path(target.string() + ".tmp." + std::to_string(::getpid()) + "." +
                            core::random_uuid().substr(0, 8));
  const auto body = to_json(ws).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_failure("cannot create", tmp);
  try {
    write_all(fd, body, tmp);
    if (sync_ && ::fsync(fd) != 0) io_failure("cannot sync", tmp);
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::close(fd);
  if (fault_hook_) fault_hook_(tmp, target);
  if (::rename(tmp.c_str(), target.c_str()) != 0) {
    const int err = errno;
    ::unlink(tmp.c_str());
    errno = err;
    io_failure("cannot rename into", target);
  }
  if (sync_) sync_dir(dir_);
}

void FileStorage::remove(const std::string& id) {
  if (!core::is_uuid_v4(id)) return;
  std::error_code ec;
  fs::remove(file_for(id), ec);
  if (ec) throw Error(ErrorCode::storage_failure, "cannot delete workspace " + id + ": " + ec.message());
  if (sync_) sync_dir(dir_);
}

std::vector<std::string> FileStorage::ids() const {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir_, ec)) {
    const auto& p = entry.path();
    // Leftover *.tmp.* files from interrupted writes are ignored.
    if (p.extension() == ".json" && core::is_uuid_v4(p.stem().string())) out.push_back(p.stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---- WorkspaceStore ----

WorkspaceStore::WorkspaceStore(const fs::path& data_dir, StoreOptions options)
    : WorkspaceStore(std::make_unique<FileStorage>(data_dir / "workspaces", options.sync),
                     std::make_unique<InteractionLog>(data_dir / "log.jsonl", options.sync),
                     std::move(options)) {}

WorkspaceStore::WorkspaceStore(std::unique_ptr<Storage> storage, std::unique_ptr<InteractionLog> log,
                               StoreOptions options)
    : storage_(std::move(storage)),
      log_(std::move(log)),
      clock_(options.clock ? std::move(options.clock) : core::Clock(core::now)),
      ids_(options.id_seed) {
  for (const auto& id : storage_->ids()) {
    try {
      if (auto ws = storage_->read(id)) index_[id] = summarize(*ws);
    } catch (const Error& e) {
      spdlog::warn("skipping workspace {}: {}", id, e.what());
    }
  }
}

std::shared_ptr<std::mutex> WorkspaceStore::lock_for(const std::string& id) {
  std::lock_guard lock(index_mutex_);
  auto& m = locks_[id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

void WorkspaceStore::check_name_locked(const std::string& name, std::string_view self_id) const {
  for (const auto& [id, s] : index_) {
    if (id != self_id && core::canonical_equal(s.name, name)) {
      throw Error(ErrorCode::name_conflict, "a workspace named '" + name + "' already exists",
                  {{"name", name}, {"workspace_id", id}});
    }
  }
}

namespace {

std::string checked_name(std::string_view name) {
  auto trimmed = core::trim(name);
  if (trimmed.empty()) throw Error(ErrorCode::empty_name, "workspace name is empty");
  return trimmed;
}

}  // namespace

core::Workspace WorkspaceStore::create(std::string_view raw_name) {
  const auto name = checked_name(raw_name);
  core::Workspace ws;
  ws.id = new_id();
  ws.name = name;
  ws.created_at = ws.modified_at = now();
  {
    std::lock_guard lock(index_mutex_);
    check_name_locked(name, ws.id);
    storage_->write(ws);
    index_[ws.id] = summarize(ws);
  }
  log_event(ws.id, Actor::user, LogEvent::workspace_event, {{"action", "created"}, {"name", name}});
  return ws;
}

core::Workspace WorkspaceStore::duplicate(std::string_view id, std::string_view raw_name) {
  const auto name = checked_name(raw_name);
  const auto source_lock = lock_for(std::string(id));
  core::Workspace copy;
  json id_map = json::object();
  {
    std::lock_guard source_guard(*source_lock);
    copy = load(id);
    copy.id = new_id();
    copy.name = name;
    for (auto& w : copy.widgets) {
      auto fresh_id = new_id();
      id_map[w.id] = fresh_id;
      w.id = std::move(fresh_id);
    }
    copy.created_at = copy.modified_at = now();
    {
      std::lock_guard lock(index_mutex_);
      check_name_locked(name, copy.id);
      storage_->write(copy);
      index_[copy.id] = summarize(copy);
    }
    log_event(copy.id, Actor::user, LogEvent::workspace_event,
              {{"action", "duplicated"}, {"source_id", std::string(id)}, {"name", name}, {"widget_ids", id_map}});
  }
  return copy;
}

core::Workspace WorkspaceStore::rename(std::string_view id, std::string_view raw_name) {
  const auto name = checked_name(raw_name);
  const auto ws_lock = lock_for(std::string(id));
  core::Workspace ws;
  {
    std::lock_guard guard(*ws_lock);
    ws = load(id);
    ws.name = name;
    ws.modified_at = now();
    {
      std::lock_guard lock(index_mutex_);
      check_name_locked(name, ws.id);
      storage_->write(ws);
      index_[ws.id] = summarize(ws);
    }
    log_event(ws.id, Actor::user, LogEvent::workspace_event, {{"action", "renamed"}, {"name", name}});
  }
  return ws;
}

void WorkspaceStore::remove(std::string_view id) {
  const auto ws_lock = lock_for(std::string(id));
  {
    std::lock_guard guard(*ws_lock);
    {
      std::lock_guard lock(index_mutex_);
      if (!index_.count(std::string(id))) unknown(id);
    }
    // Tombstone first: a crash after this line leaves a file that the
    // log already marks deleted, which replay treats as deleted.
    log_event(id, Actor::user, LogEvent::workspace_event, {{"action", "deleted"}});
    storage_->remove(std::string(id));
    std::lock_guard lock(index_mutex_);
    index_.erase(std::string(id));
  }
}

std::vector<WorkspaceSummary> WorkspaceStore::list() const {
  std::vector<WorkspaceSummary> out;
  {
    std::lock_guard lock(index_mutex_);
    for (const auto& [id, s] : index_) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const WorkspaceSummary& a, const WorkspaceSummary& b) {
    if (a.modified_at != b.modified_at) return a.modified_at > b.modified_at;
    if (a.name != b.name) return a.name < b.name;
    return a.id < b.id;
  });
  return out;
}

core::Workspace WorkspaceStore::load(std::string_view id) const {
  {
    std::lock_guard lock(index_mutex_);
    if (!index_.count(std::string(id))) unknown(id);
  }
  auto ws = storage_->read(std::string(id));
  if (!ws) unknown(id);
  return *std::move(ws);
}

void WorkspaceStore::save(const core::Workspace& ws) {
  const auto name = checked_name(ws.name);
  const auto ws_lock = lock_for(ws.id);
  std::lock_guard guard(*ws_lock);
  std::lock_guard lock(index_mutex_);
  check_name_locked(name, ws.id);
  storage_->write(ws);
  index_[ws.id] = summarize(ws);
}

core::Workspace WorkspaceStore::update(std::string_view id,
                                       const std::function<void(core::Workspace&)>& fn) {
  return update(id, [&](core::Workspace& ws, LogBatch&) { fn(ws); });
}

core::Workspace WorkspaceStore::update(std::string_view id,
                                       const std::function<void(core::Workspace&, LogBatch&)>& fn) {
  const auto ws_lock = lock_for(std::string(id));
  std::lock_guard guard(*ws_lock);
  auto ws = load(id);
  const auto original_id = ws.id;
  const auto original_name = ws.name;
  LogBatch batch;
  fn(ws, batch);
  if (ws.id != original_id || ws.name != original_name) {
    throw Error(ErrorCode::internal_error, "update may not change the workspace id or name");
  }
  ws.modified_at = std::max(now(), ws.modified_at);
  storage_->write(ws);
  {
    std::lock_guard lock(index_mutex_);
    index_[ws.id] = summarize(ws);
  }
  for (auto& p : batch) log_event(ws.id, p.actor, p.event, std::move(p.detail));
  return ws;
}

LogEntry WorkspaceStore::log_event(std::string_view workspace_id, Actor actor, LogEvent event,
                                   LogDetail detail) {
  return log_->append(LogEntry{now(), std::string(workspace_id), actor, event, std::move(detail)});
}

}  // namespace pc::store
