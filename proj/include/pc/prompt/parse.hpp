#pragma once

#include "pc/core/widget.hpp"
#include "pc/prompt/flow.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <string>
#include <vector>

namespace pc::prompt {

/// Strict: unknown fields, wrong types, 0 or >4 widgets, >3 options or empty
/// labels raise Error(schema_violation) with the offending path.
std::vector<core::WidgetSpec> parse_widgets_response(const nlohmann::json& payload);

/// Exactly two strings, unique under canonical equality
/// (Error(duplicate_options) otherwise). Returned trimmed.
std::array<std::string, 2> parse_options_response(const nlohmann::json& payload);

/// Single string, trimmed; blank is a schema violation.
std::string parse_extract_response(const nlohmann::json& payload);

/// Inverse of parse_widgets_response for valid specs.
nlohmann::json widgets_payload(const std::vector<core::WidgetSpec>& specs);

/// Runs the parser matching `flow` and discards the result. Used as the
/// gateway's structured-output validator.
void check_structured_payload(FlowKind flow, const nlohmann::json& payload);

}  // namespace pc::prompt
