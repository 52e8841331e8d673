#include "pc/service/service.hpp"

#include "pc/core/text.hpp"
#include "pc/error.hpp"
#include "pc/prompt/parse.hpp"
#include "pc/prompt/templates.hpp"
#include "pc/store/serialization.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

namespace pc::service {

using nlohmann::json;
using store::Actor;
using store::LogBatch;
using store::LogEvent;

namespace {

json placement(const core::ControlWidget& w) {
  return {{"widget_id", w.id},
          {"zone", core::to_string(w.zone)},
          {"position", w.position ? store::to_json(*w.position) : json(nullptr)},
          {"size", store::to_json(w.size)},
          {"fresh", w.fresh}};
}

void check_finite(core::Vec2 v, const char* what) {
  if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
    throw Error(ErrorCode::malformed_request, std::string(what) + " must be finite");
  }
}

std::string flow_name(prompt::FlowKind flow) { return std::string(prompt::to_string(flow)); }

}  // namespace

// ---- StreamJob ----

StreamJob::StreamJob(Service& service, std::string workspace_id, prompt::FlowRequest request,
                     core::RevisionCause cause)
    : service_(service), workspace_id_(std::move(workspace_id)), request_(std::move(request)),
      cause_(cause) {}

StreamJob::~StreamJob() { service_.release_stream_slot(workspace_id_); }

core::Document StreamJob::run(const gateway::ChunkSink& on_delta) {
  if (ran_) throw Error(ErrorCode::internal_error, "stream job already ran");
  ran_ = true;
  auto& store = service_.store_;
  const auto flow = flow_name(request_.flow);
  store.log_event(workspace_id_, Actor::system, LogEvent::flow_started, {{"flow", flow}});

  std::string text;
  try {
    text = service_.gateway_->complete_streaming(request_, [&](const gateway::StreamEvent& e) {
      if (e.kind == gateway::StreamEventKind::delta) on_delta(e.payload);
    });
  } catch (const Error& e) {
    store.log_event(workspace_id_, Actor::system, LogEvent::flow_failed,
                    {{"flow", flow},
                     {"code", std::string(to_string(e.code()))},
                     {"attempts", 1},
                     {"partial_length", e.detail().value("partial", "").size()}});
    throw;
  }

  try {
    const auto ws = store.update(workspace_id_, [&](core::Workspace& ws, LogBatch& log) {
      const auto at = store.now();
      ws.document = core::push_revision(std::move(ws.document), text, cause_, at);
      log.push_back({Actor::system, LogEvent::revision_pushed,
                     {{"content", text},
                      {"cause", std::string(core::to_string(cause_))},
                      {"at", core::format_timestamp(at)}}});
      log.push_back({Actor::system, LogEvent::flow_completed,
                     {{"flow", flow}, {"attempts", 1}, {"length", text.size()}}});
    });
    return ws.document;
  } catch (const Error& e) {
    // The workspace vanished or could not be saved after a complete stream.
    json detail = e.detail().is_object() ? e.detail() : json::object();
    detail["partial"] = text;
    store.log_event(workspace_id_, Actor::system, LogEvent::flow_failed,
                    {{"flow", flow}, {"code", std::string(to_string(e.code()))}, {"attempts", 1}});
    throw Error(e.code(), e.what(), std::move(detail));
  }
}

// ---- Service ----

Service::Service(store::WorkspaceStore& store, std::shared_ptr<gateway::Gateway> gateway,
                 ServiceOptions options)
    : store_(store), gateway_(std::move(gateway)), options_(options) {}

prompt::FlowRequest Service::configured(prompt::FlowRequest request) const {
  request.temperature = options_.temperature;
  return request;
}

gateway::StructuredResult Service::run_structured(std::string_view ws_id,
                                                  const prompt::FlowRequest& request) {
  const auto flow = flow_name(request.flow);
  store_.log_event(ws_id, Actor::system, LogEvent::flow_started, {{"flow", flow}});
  try {
    auto result = gateway_->complete_structured(request);
    store_.log_event(ws_id, Actor::system, LogEvent::flow_completed,
                     {{"flow", flow}, {"attempts", result.attempts}});
    return result;
  } catch (const Error& e) {
    store::LogDetail detail{{"flow", flow}, {"code", std::string(to_string(e.code()))}};
    if (e.detail().is_object() && e.detail().contains("attempts")) detail["attempts"] = e.detail()["attempts"];
    store_.log_event(ws_id, Actor::system, LogEvent::flow_failed, std::move(detail));
    throw;
  }
}

void Service::claim_stream_slot(const std::string& ws_id) {
  std::lock_guard lock(streams_mutex_);
  if (!streaming_.insert(ws_id).second) {
    throw Error(ErrorCode::flow_in_progress, "a rephrase or prompt is already running for this workspace",
                {{"workspace_id", ws_id}});
  }
}

void Service::release_stream_slot(const std::string& ws_id) {
  std::lock_guard lock(streams_mutex_);
  streaming_.erase(ws_id);
}

// Workspaces

core::Workspace Service::create_workspace(std::string_view name) { return store_.create(name); }

std::vector<store::WorkspaceSummary> Service::list_workspaces() const { return store_.list(); }

core::Workspace Service::get_workspace(std::string_view id) const { return store_.load(id); }

core::Workspace Service::rename_workspace(std::string_view id, std::string_view name) {
  return store_.rename(id, name);
}

core::Workspace Service::duplicate_workspace(std::string_view id, std::string_view name) {
  return store_.duplicate(id, name);
}

void Service::delete_workspace(std::string_view id) { store_.remove(id); }

core::Workspace Service::set_viewport(std::string_view id, core::Viewport viewport) {
  check_finite(viewport.pan, "pan");
  if (!std::isfinite(viewport.zoom) || viewport.zoom <= 0) {
    throw Error(ErrorCode::malformed_request, "zoom must be a positive number");
  }
  return store_.update(id, [&](core::Workspace& ws, LogBatch& log) {
    ws.viewport = viewport;
    log.push_back({Actor::user, LogEvent::workspace_event,
                   {{"action", "viewport_set"}, {"viewport", store::to_json(viewport)}}});
  });
}

// Widgets

core::ControlWidget Service::create_widget(std::string_view ws_id, core::Vec2 position) {
  check_finite(position, "position");
  core::ControlWidget created;
  store_.update(ws_id, [&](core::Workspace& ws, LogBatch& log) {
    created = core::create_empty_widget(position, store_.new_id());
    ws.widgets.push_back(created);
    log.push_back({Actor::user, LogEvent::widget_created, {{"widget", store::to_json(created)}}});
  });
  return created;
}

core::ControlWidget Service::update_widget(std::string_view ws_id, std::string_view widget_id,
                                           const WidgetPatch& patch) {
  if (patch.size && (!std::isfinite(patch.size->width) || !std::isfinite(patch.size->height) ||
                     patch.size->width <= 0 || patch.size->height <= 0)) {
    throw Error(ErrorCode::malformed_request, "size must be positive");
  }
  core::ControlWidget out;
  store_.update(ws_id, [&](core::Workspace& ws, LogBatch& log) {
    auto& w = core::widget_at(ws, widget_id);
    if (patch.title || patch.value) {
      store::LogDetail detail{{"widget_id", w.id}};
      if (patch.title) detail["title"] = w.title = *patch.title;
      if (patch.value) detail["value"] = w.value = *patch.value;
      log.push_back({Actor::user, LogEvent::value_set, std::move(detail)});
    }
    if (patch.size) {
      w.size = *patch.size;
      log.push_back({Actor::user, LogEvent::widget_moved, placement(w)});
    }
    out = w;
  });
  return out;
}

core::ControlWidget Service::move_widget(std::string_view ws_id, std::string_view widget_id,
                                         core::Zone zone, std::optional<core::Vec2> position) {
  if (position) check_finite(*position, "position");
  core::ControlWidget out;
  store_.update(ws_id, [&](core::Workspace& ws, LogBatch& log) {
    ws = core::move_widget(std::move(ws), widget_id, zone, position);
    out = core::widget_at(ws, widget_id);
    log.push_back({Actor::user, LogEvent::widget_moved, placement(out)});
  });
  return out;
}

void Service::delete_widget(std::string_view ws_id, std::string_view widget_id) {
  store_.update(ws_id, [&](core::Workspace& ws, LogBatch& log) {
    core::widget_at(ws, widget_id);
    ws = core::remove_widget(std::move(ws), widget_id);
    log.push_back({Actor::user, LogEvent::workspace_event,
                   {{"action", "widget_deleted"}, {"widget_id", std::string(widget_id)}}});
  });
}

core::ControlWidget Service::save_input(std::string_view ws_id, std::string_view widget_id) {
  core::ControlWidget out;
  store_.update(ws_id, [&](core::Workspace& ws, LogBatch& log) {
    auto& w = core::widget_at(ws, widget_id);
    const bool novel = !core::is_blank(w.value) && !core::has_option(w, w.value);
    w = core::save_input(std::move(w));
    if (novel) {
      log.push_back({Actor::user, LogEvent::option_added, {{"widget_id", w.id}, {"option", w.options.front()}}});
    }
    out = w;
  });
  return out;
}

core::ControlWidget Service::select_option(std::string_view ws_id, std::string_view widget_id,
                                           std::size_t index) {
  core::ControlWidget out;
  store_.update(ws_id, [&](core::Workspace& ws, LogBatch& log) {
    auto& w = core::widget_at(ws, widget_id);
    w = core::set_value_from_option(std::move(w), index);
    log.push_back({Actor::user, LogEvent::value_set, {{"widget_id", w.id}, {"value", w.value}}});
    out = w;
  });
  return out;
}

core::ControlWidget Service::add_option(std::string_view ws_id, std::string_view widget_id,
                                        std::string_view option) {
  core::ControlWidget out;
  store_.update(ws_id, [&](core::Workspace& ws, LogBatch& log) {
    auto& w = core::widget_at(ws, widget_id);
    const bool novel = !core::is_blank(option) && !core::has_option(w, option);
    w = core::add_option(std::move(w), option);
    if (novel) {
      log.push_back({Actor::user, LogEvent::option_added, {{"widget_id", w.id}, {"option", w.options.front()}}});
    }
    out = w;
  });
  return out;
}

// Structured flows

std::vector<core::ControlWidget> Service::generate_widgets(std::string_view ws_id,
                                                           std::optional<std::string> guiding_prompt) {
  const auto snapshot = store_.load(ws_id);
  std::optional<std::string_view> guiding;
  if (guiding_prompt) guiding = *guiding_prompt;
  const auto request = configured(
      prompt::build_generate_widgets(snapshot.document.content, core::widget_labels(snapshot), guiding));
  const auto result = run_structured(ws_id, request);
  auto specs = prompt::parse_widgets_response(result.payload);
  const auto origin = guiding_prompt && !core::is_blank(*guiding_prompt) ? core::Origin::prompted
                                                                         : core::Origin::suggested;
  std::vector<core::ControlWidget> created;
  store_.update(ws_id, [&](core::Workspace& ws, LogBatch& log) {
    created.clear();
    // Dedup against the widgets present now, not the snapshot.
    for (const auto& spec : core::dedup_new_widgets(specs, ws.widgets)) {
      auto w = core::widget_from_spec(spec, origin, store_.new_id());
      log.push_back({Actor::system, LogEvent::widget_created, {{"widget", store::to_json(w)}}});
      ws.widgets.push_back(w);
      created.push_back(std::move(w));
    }
  });
  return created;
}

core::ControlWidget Service::suggest_options(std::string_view ws_id, std::string_view widget_id,
                                             std::optional<std::string> guiding_prompt) {
  const auto snapshot = store_.load(ws_id);
  const auto& widget = core::widget_at(snapshot, widget_id);
  auto existing = widget.options;
  existing.push_back(widget.value);
  std::optional<std::string_view> guiding;
  if (guiding_prompt) guiding = *guiding_prompt;
  const auto request = configured(
      prompt::build_generate_options(widget.title, existing, snapshot.document.content, guiding));
  const auto result = run_structured(ws_id, request);
  const auto options = prompt::parse_options_response(result.payload);
  core::ControlWidget out;
  store_.update(ws_id, [&](core::Workspace& ws, LogBatch& log) {
    auto& w = core::widget_at(ws, widget_id);
    // Insert back to front so the pair lands on top in the model's order.
    for (auto it = options.rbegin(); it != options.rend(); ++it) {
      if (core::has_option(w, *it)) continue;
      w = core::add_option(std::move(w), *it);
      log.push_back({Actor::system, LogEvent::option_added, {{"widget_id", w.id}, {"option", w.options.front()}}});
    }
    out = w;
  });
  return out;
}

core::ControlWidget Service::extract_value(std::string_view ws_id, std::string_view widget_id) {
  const auto snapshot = store_.load(ws_id);
  const auto& widget = core::widget_at(snapshot, widget_id);
  const auto request = configured(prompt::build_extract_value(widget.title, snapshot.document.content));
  const auto result = run_structured(ws_id, request);
  const auto value = prompt::parse_extract_response(result.payload);
  core::ControlWidget out;
  store_.update(ws_id, [&](core::Workspace& ws, LogBatch& log) {
    auto& w = core::widget_at(ws, widget_id);
    if (!core::has_option(w, value)) {
      w = core::add_option(std::move(w), value);
      log.push_back({Actor::system, LogEvent::option_added, {{"widget_id", w.id}, {"option", w.options.front()}}});
    }
    out = w;
  });
  return out;
}

// Document

core::Document Service::get_document(std::string_view ws_id) const { return store_.load(ws_id).document; }

core::Document Service::put_document(std::string_view ws_id, std::string content, bool checkpoint) {
  return store_
      .update(ws_id,
              [&](core::Workspace& ws, LogBatch& log) {
                if (checkpoint) {
                  const auto at = store_.now();
                  ws.document = core::push_revision(std::move(ws.document), content,
                                                    core::RevisionCause::user_edit, at);
                  log.push_back({Actor::user, LogEvent::revision_pushed,
                                 {{"content", content}, {"cause", "user_edit"}, {"at", core::format_timestamp(at)}}});
                } else {
                  ws.document.content = content;
                  log.push_back({Actor::user, LogEvent::workspace_event,
                                 {{"action", "document_edited"}, {"content", content}}});
                }
              })
      .document;
}

core::Document Service::revert_document(std::string_view ws_id, std::size_t index) {
  return store_
      .update(ws_id,
              [&](core::Workspace& ws, LogBatch& log) {
                const auto at = store_.now();
                ws.document = core::revert_to(std::move(ws.document), index, at);
                log.push_back({Actor::user, LogEvent::reverted, {{"index", index}, {"at", core::format_timestamp(at)}}});
              })
      .document;
}

std::unique_ptr<StreamJob> Service::begin_rephrase(std::string_view ws_id) {
  const auto ws = store_.load(ws_id);
  auto request = configured(prompt::build_apply_widgets(ws.document.content, core::active_pairs(ws)));
  claim_stream_slot(ws.id);
  return std::unique_ptr<StreamJob>(
      new StreamJob(*this, ws.id, std::move(request), core::RevisionCause::rephrase_widgets));
}

std::unique_ptr<StreamJob> Service::begin_prompt(std::string_view ws_id, std::string_view user_prompt) {
  const auto ws = store_.load(ws_id);
  auto request = configured(prompt::build_apply_prompt(ws.document.content, user_prompt));
  claim_stream_slot(ws.id);
  return std::unique_ptr<StreamJob>(
      new StreamJob(*this, ws.id, std::move(request), core::RevisionCause::apply_prompt));
}

}  // namespace pc::service
