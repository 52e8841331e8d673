#pragma once

#include "pc/core/ids.hpp"
#include "pc/core/workspace.hpp"
#include "pc/store/log.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pc::store {

struct WorkspaceSummary {
  std::string id;
  std::string name;
  std::size_t widget_count = 0;
  core::Timestamp created_at{};
  core::Timestamp modified_at{};

  friend bool operator==(const WorkspaceSummary&, const WorkspaceSummary&) = default;
};

nlohmann::json to_json(const WorkspaceSummary& s);
WorkspaceSummary summarize(const core::Workspace& ws);

/// Persistence backend for workspace documents. Implementations make each
/// write atomic: a concurrent or post-crash read sees the old or the new
/// document, never a mix.
class Storage {
public:
  virtual ~Storage() = default;
  virtual std::optional<core::Workspace> read(const std::string& id) const = 0;
  virtual void write(const core::Workspace& ws) = 0;
  virtual void remove(const std::string& id) = 0;
  virtual std::vector<std::string> ids() const = 0;
};

/// One `<id>.json` per workspace in `dir`, written to a temporary file,
/// fsynced and renamed into place.
class FileStorage final : public Storage {
public:
  /// Runs after the temporary file is durable and before the rename.
  using FaultHook = std::function<void(const std::filesystem::path& tmp,
                                       const std::filesystem::path& target)>;

  explicit FileStorage(std::filesystem::path dir, bool sync = true);

  std::optional<core::Workspace> read(const std::string& id) const override;
  void write(const core::Workspace& ws) override;
  void remove(const std::string& id) override;
  std::vector<std::string> ids() const override;

  void set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }
  std::filesystem::path file_for(const std::string& id) const;

private:
  std::filesystem::path dir_;
  bool sync_ = true;
  FaultHook fault_hook_;
};

/// Log entries produced by an update, appended after its write.
struct PendingLog {
  Actor actor = Actor::user;
  LogEvent event = LogEvent::workspace_event;
  LogDetail detail;
};
using LogBatch = std::vector<PendingLog>;

struct StoreOptions {
  core::Clock clock = core::now;
  std::optional<std::uint64_t> id_seed;
  /// fsync files and directories on every write. Rename atomicity, and so
  /// crash consistency against process death, does not depend on it.
  bool sync = true;
};

/// Workspace lifecycle over a Storage plus the interaction log. Mutations
/// to one workspace are serialized; reads go to the last committed file.
class WorkspaceStore {
public:
  /// `<data_dir>/workspaces/*.json` and `<data_dir>/log.jsonl`.
  explicit WorkspaceStore(const std::filesystem::path& data_dir, StoreOptions options = {});
  WorkspaceStore(std::unique_ptr<Storage> storage, std::unique_ptr<InteractionLog> log,
                 StoreOptions options = {});

  /// Throws Error(empty_name) or Error(name_conflict).
  core::Workspace create(std::string_view name);
  /// Deep copy under fresh workspace and widget ids.
  core::Workspace duplicate(std::string_view id, std::string_view new_name);
  core::Workspace rename(std::string_view id, std::string_view new_name);
  void remove(std::string_view id);
  /// modified_at descending, then name, then id.
  std::vector<WorkspaceSummary> list() const;
  /// Throws Error(unknown_workspace).
  core::Workspace load(std::string_view id) const;
  /// Persists `ws` verbatim. The id must be a UUID and the name unique.
  void save(const core::Workspace& ws);

  /// Read-modify-write under the workspace lock. `fn` edits a copy; if it
  /// returns normally the copy is stamped with modified_at and saved, and
  /// the saved value is returned. Exceptions leave the store untouched.
  core::Workspace update(std::string_view id, const std::function<void(core::Workspace&)>& fn);
  /// As update; entries `fn` adds to the batch are logged after the write
  /// while the workspace lock is still held, so log order matches save order.
  core::Workspace update(std::string_view id,
                         const std::function<void(core::Workspace&, LogBatch&)>& fn);

  /// Appends a log entry stamped with the store clock.
  LogEntry log_event(std::string_view workspace_id, Actor actor, LogEvent event, LogDetail detail);

  InteractionLog& log() noexcept { return *log_; }
  Storage& storage() noexcept { return *storage_; }
  core::Timestamp now() const { return clock_(); }
  std::string new_id() { return ids_.next(); }

private:
  std::shared_ptr<std::mutex> lock_for(const std::string& id);
  void check_name_locked(const std::string& name, std::string_view self_id) const;

  std::unique_ptr<Storage> storage_;
  std::unique_ptr<InteractionLog> log_;
  core::Clock clock_;
  core::IdGenerator ids_;

  mutable std::mutex index_mutex_;
  std::map<std::string, WorkspaceSummary> index_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace pc::store
