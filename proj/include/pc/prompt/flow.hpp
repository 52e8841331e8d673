#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pc::prompt {

enum class FlowKind { generate_widgets, generate_options, extract_value, apply_widgets, apply_prompt };
enum class Role { system, user };

inline constexpr double kDefaultTemperature = 1.06;
inline constexpr std::string_view kTemplateVersion = "v1";

struct ChatMessage {
  Role role = Role::user;
  std::string content;  // nonempty
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// A JSON Schema document plus a stable identifier. The identifier is part
/// of the request digest; the document is what gets validated and sent.
struct ResponseSchema {
  std::string id;
  nlohmann::json schema;
  friend bool operator==(const ResponseSchema&, const ResponseSchema&) = default;
};

/// stream == true exactly for apply_widgets and apply_prompt; a response
/// schema is present exactly for the three structured flows.
struct FlowRequest {
  FlowKind flow = FlowKind::apply_prompt;
  std::vector<ChatMessage> messages;
  std::optional<ResponseSchema> response_schema;
  bool stream = false;
  double temperature = kDefaultTemperature;
  friend bool operator==(const FlowRequest&, const FlowRequest&) = default;
};

bool is_streaming_flow(FlowKind flow) noexcept;

std::string_view to_string(FlowKind flow);
std::string_view to_string(Role role);
FlowKind flow_from_string(std::string_view s);
Role role_from_string(std::string_view s);

/// Full request as JSON (sorted keys); used for golden files.
nlohmann::json to_json(const FlowRequest& request);
FlowRequest flow_request_from_json(const nlohmann::json& j);

}  // namespace pc::prompt
