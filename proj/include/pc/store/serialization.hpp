#pragma once

#include "pc/core/workspace.hpp"

#include <nlohmann/json.hpp>

// JSON mapping for the domain types. Field names are a stable contract
// shared by the workspace files, the HTTP API and the CLI --json output.
// The *_from_json functions throw Error(malformed_request) with a pointer
// to the offending field.

namespace pc::store {

nlohmann::json to_json(const core::Vec2& v);
nlohmann::json to_json(const core::Size2& s);
nlohmann::json to_json(const core::ControlWidget& w);
nlohmann::json to_json(const core::Revision& r);
nlohmann::json to_json(const core::Document& d);
nlohmann::json to_json(const core::Viewport& v);
nlohmann::json to_json(const core::Workspace& ws);

core::Vec2 vec2_from_json(const nlohmann::json& j);
core::Size2 size_from_json(const nlohmann::json& j);
core::ControlWidget widget_from_json(const nlohmann::json& j);
core::Revision revision_from_json(const nlohmann::json& j);
core::Document document_from_json(const nlohmann::json& j);
core::Viewport viewport_from_json(const nlohmann::json& j);
core::Workspace workspace_from_json(const nlohmann::json& j);

}  // namespace pc::store
