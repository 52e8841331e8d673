#pragma once

#include "pc/core/workspace.hpp"
#include "pc/gateway/provider.hpp"
#include "pc/service/service.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pc::cli {

struct StreamOutcome {
  std::string content;
  std::size_t history_length = 0;
  friend bool operator==(const StreamOutcome&, const StreamOutcome&) = default;
};

/// The operations the CLI drives, either directly against a Service or over
/// the HTTP API. Failures surface as pc::Error with the same code either way.
class Backend {
public:
  virtual ~Backend() = default;

  virtual core::Workspace create_workspace(const std::string& name) = 0;
  /// Array of workspace summaries, as served by GET /workspaces.
  virtual nlohmann::json list_workspaces() = 0;
  virtual core::Workspace get_workspace(const std::string& id) = 0;
  virtual core::Workspace rename_workspace(const std::string& id, const std::string& name) = 0;
  virtual core::Workspace duplicate_workspace(const std::string& id, const std::string& name) = 0;
  virtual void delete_workspace(const std::string& id) = 0;

  virtual core::ControlWidget create_widget(const std::string& ws, core::Vec2 position) = 0;
  virtual core::ControlWidget update_widget(const std::string& ws, const std::string& wid,
                                            const service::WidgetPatch& patch) = 0;
  virtual core::ControlWidget move_widget(const std::string& ws, const std::string& wid, core::Zone zone,
                                          std::optional<core::Vec2> position) = 0;
  virtual void delete_widget(const std::string& ws, const std::string& wid) = 0;
  virtual core::ControlWidget save_input(const std::string& ws, const std::string& wid) = 0;
  virtual core::ControlWidget select_option(const std::string& ws, const std::string& wid, std::size_t index) = 0;
  virtual core::ControlWidget add_option(const std::string& ws, const std::string& wid,
                                         const std::string& option) = 0;

  virtual std::vector<core::ControlWidget> generate_widgets(const std::string& ws,
                                                            std::optional<std::string> guiding_prompt) = 0;
  virtual core::ControlWidget suggest_options(const std::string& ws, const std::string& wid,
                                              std::optional<std::string> guiding_prompt) = 0;
  virtual core::ControlWidget extract_value(const std::string& ws, const std::string& wid) = 0;

  virtual core::Document put_document(const std::string& ws, const std::string& content, bool checkpoint) = 0;
  virtual core::Document revert_document(const std::string& ws, std::size_t index) = 0;
  virtual StreamOutcome rephrase(const std::string& ws, const gateway::ChunkSink& on_delta) = 0;
  virtual StreamOutcome prompt(const std::string& ws, const std::string& prompt,
                               const gateway::ChunkSink& on_delta) = 0;
};

std::unique_ptr<Backend> make_in_process_backend(service::Service& service);

/// `base_url` like "http://127.0.0.1:8080".
std::unique_ptr<Backend> make_http_backend(const std::string& base_url);

}  // namespace pc::cli
