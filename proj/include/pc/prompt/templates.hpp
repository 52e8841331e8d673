#pragma once

#include "pc/core/workspace.hpp"
#include "pc/prompt/flow.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pc::prompt {

// Request constructors for the five flows. All are pure: identical inputs
// produce identical requests.

/// Throws Error(empty_text).
FlowRequest build_generate_widgets(std::string_view text,
                                   const std::vector<std::string>& existing_labels,
                                   std::optional<std::string_view> guiding_prompt = std::nullopt);

/// Throws Error(empty_title).
FlowRequest build_generate_options(std::string_view widget_title,
                                   const std::vector<std::string>& existing_values,
                                   std::string_view text,
                                   std::optional<std::string_view> guiding_prompt = std::nullopt);

/// Throws Error(empty_title) or Error(empty_text).
FlowRequest build_extract_value(std::string_view widget_title, std::string_view text);

/// Throws Error(no_active_widgets) when `pairs` is empty, Error(empty_text)
/// when `text` is blank.
FlowRequest build_apply_widgets(std::string_view text, const std::vector<core::LabelValue>& pairs);

/// Empty text is allowed (initial generation). Throws Error(empty_prompt).
FlowRequest build_apply_prompt(std::string_view text, std::string_view user_prompt);

/// "label: value" lines, one per pair.
std::string format_specifications(const std::vector<core::LabelValue>& pairs);

}  // namespace pc::prompt
