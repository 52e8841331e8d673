#include "pc/store/replay.hpp"

#include "pc/error.hpp"
#include "pc/store/serialization.hpp"

namespace pc::store {

using nlohmann::json;

namespace {

core::Workspace& existing(std::map<std::string, core::Workspace>& out, const LogEntry& e) {
  auto it = out.find(e.workspace_id);
  if (it == out.end()) {
    throw Error(ErrorCode::malformed_request, "log refers to unknown workspace " + e.workspace_id);
  }
  return it->second;
}

const json& at(const LogDetail& d, const char* key) {
  auto it = d.find(key);
  if (it == d.end()) throw Error(ErrorCode::malformed_request, std::string("log detail lacks ") + key);
  return it->second;
}

std::string text_at(const LogDetail& d, const char* key) {
  const auto& v = at(d, key);
  if (!v.is_string()) throw Error(ErrorCode::malformed_request, std::string("log detail ") + key + " is not text");
  return v.get<std::string>();
}

void apply_workspace_event(std::map<std::string, core::Workspace>& out, const LogEntry& e) {
  const auto action = text_at(e.detail, "action");
  if (action == "created") {
    core::Workspace ws;
    ws.id = e.workspace_id;
    ws.name = text_at(e.detail, "name");
    ws.created_at = ws.modified_at = e.timestamp;
    out[ws.id] = std::move(ws);
    return;
  }
  if (action == "duplicated") {
    const auto source_id = text_at(e.detail, "source_id");
    auto src = out.find(source_id);
    if (src == out.end()) throw Error(ErrorCode::malformed_request, "duplicate of unknown workspace " + source_id);
    auto copy = src->second;
    copy.id = e.workspace_id;
    copy.name = text_at(e.detail, "name");
    const auto& ids = at(e.detail, "widget_ids");
    for (auto& w : copy.widgets) w.id = ids.at(w.id).get<std::string>();
    copy.created_at = copy.modified_at = e.timestamp;
    out[copy.id] = std::move(copy);
    return;
  }
  if (action == "deleted") {
    out.erase(e.workspace_id);
    return;
  }
  auto& ws = existing(out, e);
  if (action == "renamed") {
    ws.name = text_at(e.detail, "name");
  } else if (action == "widget_deleted") {
    ws = core::remove_widget(std::move(ws), text_at(e.detail, "widget_id"));
  } else if (action == "document_edited") {
    ws.document.content = text_at(e.detail, "content");
  } else if (action == "viewport_set") {
    ws.viewport = viewport_from_json(at(e.detail, "viewport"));
  } else {
    throw Error(ErrorCode::malformed_request, "unknown workspace action " + action);
  }
}

core::Timestamp stamp_at(const LogDetail& d) {
  try {
    return core::parse_timestamp(text_at(d, "at"));
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::malformed_request, "log detail has a bad timestamp");
  }
}

}  // namespace

std::map<std::string, core::Workspace> rebuild_from_log(const std::vector<LogEntry>& entries) {
  std::map<std::string, core::Workspace> out;
  try {
    for (const auto& e : entries) {
      switch (e.event) {
        case LogEvent::workspace_event:
          apply_workspace_event(out, e);
          break;
        case LogEvent::widget_created:
          existing(out, e).widgets.push_back(widget_from_json(at(e.detail, "widget")));
          break;
        case LogEvent::widget_moved: {
          auto& w = core::widget_at(existing(out, e), text_at(e.detail, "widget_id"));
          w.zone = core::zone_from_string(text_at(e.detail, "zone"));
          const auto& pos = at(e.detail, "position");
          w.position = pos.is_null() ? std::nullopt : std::optional(vec2_from_json(pos));
          w.size = size_from_json(at(e.detail, "size"));
          w.fresh = at(e.detail, "fresh").get<bool>();
          break;
        }
        case LogEvent::option_added: {
          auto& w = core::widget_at(existing(out, e), text_at(e.detail, "widget_id"));
          w = core::add_option(std::move(w), text_at(e.detail, "option"));
          break;
        }
        case LogEvent::value_set: {
          auto& w = core::widget_at(existing(out, e), text_at(e.detail, "widget_id"));
          if (e.detail.count("title")) w.title = text_at(e.detail, "title");
          if (e.detail.count("value")) w.value = text_at(e.detail, "value");
          break;
        }
        case LogEvent::revision_pushed: {
          auto& ws = existing(out, e);
          ws.document = core::push_revision(std::move(ws.document), text_at(e.detail, "content"),
                                            core::revision_cause_from_string(text_at(e.detail, "cause")),
                                            stamp_at(e.detail));
          break;
        }
        case LogEvent::reverted: {
          auto& ws = existing(out, e);
          ws.document = core::revert_to(std::move(ws.document), at(e.detail, "index").get<std::size_t>(),
                                        stamp_at(e.detail));
          break;
        }
        case LogEvent::flow_started:
        case LogEvent::flow_completed:
        case LogEvent::flow_failed:
          break;
      }
      if (auto it = out.find(e.workspace_id); it != out.end()) it->second.modified_at = e.timestamp;
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::malformed_request, std::string("cannot replay log: ") + ex.what());
  }
  return out;
}

core::Workspace content_of(core::Workspace ws) {
  ws.created_at = {};
  ws.modified_at = {};
  return ws;
}

}  // namespace pc::store
