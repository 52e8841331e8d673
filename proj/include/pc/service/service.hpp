#pragma once

#include "pc/core/workspace.hpp"
#include "pc/gateway/gateway.hpp"
#include "pc/prompt/flow.hpp"
#include "pc/store/store.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pc::service {

inline constexpr std::string_view kVersion = "0.1.0";

struct ServiceOptions {
  double temperature = prompt::kDefaultTemperature;
};

struct WidgetPatch {
  std::optional<std::string> title;
  std::optional<std::string> value;
  std::optional<core::Size2> size;
};

class Service;

/// A rephrase or prompt flow whose preconditions have been checked and
/// which holds the workspace's single streaming slot until destroyed.
class StreamJob {
public:
  ~StreamJob();
  StreamJob(const StreamJob&) = delete;
  StreamJob& operator=(const StreamJob&) = delete;

  /// Forwards model chunks to `on_delta`, then replaces the document and
  /// pushes one revision. On failure the document is left as it was and the
  /// Error is rethrown with detail["partial"]. Runs at most once.
  core::Document run(const gateway::ChunkSink& on_delta);

  prompt::FlowKind flow() const noexcept { return request_.flow; }

private:
  friend class Service;
  StreamJob(Service& service, std::string workspace_id, prompt::FlowRequest request,
            core::RevisionCause cause);

  Service& service_;
  std::string workspace_id_;
  prompt::FlowRequest request_;
  core::RevisionCause cause_;
  bool ran_ = false;
};

/// Orchestrates the flows and workspace editing on top of the store and
/// the model gateway. Every mutation is saved and logged before returning.
/// Thread-safe.
class Service {
public:
  Service(store::WorkspaceStore& store, std::shared_ptr<gateway::Gateway> gateway,
          ServiceOptions options = {});

  // Workspaces
  core::Workspace create_workspace(std::string_view name);
  std::vector<store::WorkspaceSummary> list_workspaces() const;
  core::Workspace get_workspace(std::string_view id) const;
  core::Workspace rename_workspace(std::string_view id, std::string_view name);
  core::Workspace duplicate_workspace(std::string_view id, std::string_view name);
  void delete_workspace(std::string_view id);
  core::Workspace set_viewport(std::string_view id, core::Viewport viewport);

  // Widgets
  core::ControlWidget create_widget(std::string_view ws_id, core::Vec2 position);
  core::ControlWidget update_widget(std::string_view ws_id, std::string_view widget_id,
                                    const WidgetPatch& patch);
  core::ControlWidget move_widget(std::string_view ws_id, std::string_view widget_id,
                                  core::Zone zone, std::optional<core::Vec2> position);
  void delete_widget(std::string_view ws_id, std::string_view widget_id);
  core::ControlWidget save_input(std::string_view ws_id, std::string_view widget_id);
  core::ControlWidget select_option(std::string_view ws_id, std::string_view widget_id,
                                    std::size_t index);
  core::ControlWidget add_option(std::string_view ws_id, std::string_view widget_id,
                                 std::string_view option);

  // Structured flows
  /// New widgets, in the order the model proposed them, after dedup.
  std::vector<core::ControlWidget> generate_widgets(std::string_view ws_id,
                                                    std::optional<std::string> guiding_prompt);
  core::ControlWidget suggest_options(std::string_view ws_id, std::string_view widget_id,
                                      std::optional<std::string> guiding_prompt);
  core::ControlWidget extract_value(std::string_view ws_id, std::string_view widget_id);

  // Document
  core::Document get_document(std::string_view ws_id) const;
  core::Document put_document(std::string_view ws_id, std::string content, bool checkpoint);
  core::Document revert_document(std::string_view ws_id, std::size_t index);
  /// Throw Error(no_active_widgets / empty_text / empty_prompt /
  /// flow_in_progress) before anything is streamed.
  std::unique_ptr<StreamJob> begin_rephrase(std::string_view ws_id);
  std::unique_ptr<StreamJob> begin_prompt(std::string_view ws_id, std::string_view prompt);

  store::WorkspaceStore& store() noexcept { return store_; }
  gateway::Gateway& gateway() noexcept { return *gateway_; }

private:
  friend class StreamJob;

  prompt::FlowRequest configured(prompt::FlowRequest request) const;
  gateway::StructuredResult run_structured(std::string_view ws_id, const prompt::FlowRequest& request);
  void claim_stream_slot(const std::string& ws_id);
  void release_stream_slot(const std::string& ws_id);

  store::WorkspaceStore& store_;
  std::shared_ptr<gateway::Gateway> gateway_;
  ServiceOptions options_;

  std::mutex streams_mutex_;
  std::set<std::string> streaming_;
};

}  // namespace pc::service
