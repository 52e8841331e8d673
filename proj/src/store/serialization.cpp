#include "pc/store/serialization.hpp"

#include "pc/error.hpp"

#include <cmath>

namespace pc::store {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::malformed_request, path + ": " + why, {{"path", path}});
}

const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) bad(path, "expected object");
  auto it = j.find(key);
  if (it == j.end()) bad(path + "/" + key, "missing field");
  return *it;
}

std::string str(const json& j, const std::string& path, const char* key) {
  const auto& v = field(j, path, key);
  if (!v.is_string()) bad(path + "/" + key, "expected string");
  return v.get<std::string>();
}

double num(const json& j, const std::string& path, const char* key) {
  const auto& v = field(j, path, key);
  if (!v.is_number()) bad(path + "/" + key, "expected number");
  const auto d = v.get<double>();
  if (!std::isfinite(d)) bad(path + "/" + key, "expected finite number");
  return d;
}

bool boolean(const json& j, const std::string& path, const char* key) {
  const auto& v = field(j, path, key);
  if (!v.is_boolean()) bad(path + "/" + key, "expected boolean");
  return v.get<bool>();
}

core::Timestamp stamp(const json& j, const std::string& path, const char* key) {
  try {
    return core::parse_timestamp(str(j, path, key));
  } catch (const std::invalid_argument&) {
    bad(path + "/" + key, "expected RFC 3339 timestamp");
  }
}

const json& array(const json& j, const std::string& path, const char* key) {
  const auto& v = field(j, path, key);
  if (!v.is_array()) bad(path + "/" + key, "expected array");
  return v;
}

template <typename F>
auto enum_field(const json& j, const std::string& path, const char* key, F from_string) {
  const auto s = str(j, path, key);
  try {
    return from_string(s);
  } catch (const Error&) {
    bad(path + "/" + key, "unknown value '" + s + "'");
  }
}

core::Vec2 vec2_at(const json& j, const std::string& path) {
  return {num(j, path, "x"), num(j, path, "y")};
}

core::Size2 size_at(const json& j, const std::string& path) {
  core::Size2 s{num(j, path, "width"), num(j, path, "height")};
  if (s.width <= 0 || s.height <= 0) bad(path, "size must be positive");
  return s;
}

core::ControlWidget widget_at(const json& j, const std::string& path) {
  core::ControlWidget w;
  w.id = str(j, path, "id");
  if (w.id.empty()) bad(path + "/id", "empty id");
  w.title = str(j, path, "title");
  w.value = str(j, path, "value");
  const auto& options = array(j, path, "options");
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (!options[i].is_string()) bad(path + "/options/" + std::to_string(i), "expected string");
    w.options.push_back(options[i].get<std::string>());
  }
  w.zone = enum_field(j, path, "zone", core::zone_from_string);
  const auto& pos = field(j, path, "position");
  if (!pos.is_null()) w.position = vec2_at(pos, path + "/position");
  if (w.position.has_value() != (w.zone == core::Zone::canvas)) {
    bad(path + "/position", "position must be set exactly for canvas widgets");
  }
  w.size = size_at(field(j, path, "size"), path + "/size");
  w.fresh = boolean(j, path, "fresh");
  if (w.fresh && w.zone != core::Zone::panel) bad(path + "/fresh", "only panel widgets can be fresh");
  w.origin = enum_field(j, path, "origin", core::origin_from_string);
  return w;
}

core::Revision revision_at(const json& j, const std::string& path) {
  core::Revision r;
  r.text = str(j, path, "text");
  r.cause = enum_field(j, path, "cause", core::revision_cause_from_string);
  r.timestamp = stamp(j, path, "timestamp");
  const auto& src = field(j, path, "source_revision");
  if (!src.is_null()) {
    if (!src.is_number_unsigned()) bad(path + "/source_revision", "expected index");
    r.source_revision = src.get<std::size_t>();
  }
  if (r.source_revision.has_value() != (r.cause == core::RevisionCause::revert)) {
    bad(path + "/source_revision", "source_revision must be set exactly for reverts");
  }
  return r;
}

core::Document document_at(const json& j, const std::string& path) {
  core::Document d;
  d.content = str(j, path, "content");
  const auto& history = array(j, path, "history");
  for (std::size_t i = 0; i < history.size(); ++i) {
    d.history.push_back(revision_at(history[i], path + "/history/" + std::to_string(i)));
  }
  return d;
}

core::Viewport viewport_at(const json& j, const std::string& path) {
  core::Viewport v{vec2_at(field(j, path, "pan"), path + "/pan"), num(j, path, "zoom")};
  if (v.zoom <= 0) bad(path + "/zoom", "zoom must be positive");
  return v;
}

}  // namespace

json to_json(const core::Vec2& v) { return {{"x", v.x}, {"y", v.y}}; }

json to_json(const core::Size2& s) { return {{"width", s.width}, {"height", s.height}}; }

json to_json(const core::ControlWidget& w) {
  return {{"id", w.id},
          {"title", w.title},
          {"value", w.value},
          {"options", w.options},
          {"zone", core::to_string(w.zone)},
          {"position", w.position ? to_json(*w.position) : json(nullptr)},
          {"size", to_json(w.size)},
          {"fresh", w.fresh},
          {"origin", core::to_string(w.origin)}};
}

json to_json(const core::Revision& r) {
  return {{"text", r.text},
          {"cause", core::to_string(r.cause)},
          {"timestamp", core::format_timestamp(r.timestamp)},
          {"source_revision", r.source_revision ? json(*r.source_revision) : json(nullptr)}};
}

json to_json(const core::Document& d) {
  json history = json::array();
  for (const auto& r : d.history) history.push_back(to_json(r));
  return {{"content", d.content}, {"history", std::move(history)}};
}

json to_json(const core::Viewport& v) { return {{"pan", to_json(v.pan)}, {"zoom", v.zoom}}; }

json to_json(const core::Workspace& ws) {
  json widgets = json::array();
  for (const auto& w : ws.widgets) widgets.push_back(to_json(w));
  return {{"id", ws.id},
          {"name", ws.name},
          {"widgets", std::move(widgets)},
          {"document", to_json(ws.document)},
          {"viewport", to_json(ws.viewport)},
          {"created_at", core::format_timestamp(ws.created_at)},
          {"modified_at", core::format_timestamp(ws.modified_at)}};
}

core::Vec2 vec2_from_json(const json& j) { return vec2_at(j, ""); }
core::Size2 size_from_json(const json& j) { return size_at(j, ""); }
core::ControlWidget widget_from_json(const json& j) { return widget_at(j, ""); }
core::Revision revision_from_json(const json& j) { return revision_at(j, ""); }
core::Document document_from_json(const json& j) { return document_at(j, ""); }
core::Viewport viewport_from_json(const json& j) { return viewport_at(j, ""); }

core::Workspace workspace_from_json(const json& j) {
  core::Workspace ws;
  ws.id = str(j, "", "id");
  ws.name = str(j, "", "name");
  const auto& widgets = array(j, "", "widgets");
  for (std::size_t i = 0; i < widgets.size(); ++i) {
    ws.widgets.push_back(widget_at(widgets[i], "/widgets/" + std::to_string(i)));
  }
  ws.document = document_at(field(j, "", "document"), "/document");
  ws.viewport = viewport_at(field(j, "", "viewport"), "/viewport");
  ws.created_at = stamp(j, "", "created_at");
  ws.modified_at = stamp(j, "", "modified_at");
  return ws;
}

}  // namespace pc::store
