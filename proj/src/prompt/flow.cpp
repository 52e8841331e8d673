#include "pc/prompt/flow.hpp"

#include "pc/error.hpp"

#include <array>
#include <utility>

namespace pc::prompt {
namespace {

constexpr std::array<std::pair<FlowKind, std::string_view>, 5> kFlowNames{{
    {FlowKind::generate_widgets, "generate_widgets"},
    {FlowKind::generate_options, "generate_options"},
    {FlowKind::extract_value, "extract_value"},
    {FlowKind::apply_widgets, "apply_widgets"},
    {FlowKind::apply_prompt, "apply_prompt"},
}};

}  // namespace

bool is_streaming_flow(FlowKind flow) noexcept {
  return flow == FlowKind::apply_widgets || flow == FlowKind::apply_prompt;
}

std::string_view to_string(FlowKind flow) {
  for (const auto& [f, name] : kFlowNames) {
    if (f == flow) return name;
  }
  return "apply_prompt";
}

std::string_view to_string(Role role) { return role == Role::system ? "system" : "user"; }

FlowKind flow_from_string(std::string_view s) {
  for (const auto& [f, name] : kFlowNames) {
    if (name == s) return f;
  }
  throw Error(ErrorCode::malformed_request, "unknown flow: " + std::string(s));
}

Role role_from_string(std::string_view s) {
  if (s == "system") return Role::system;
  if (s == "user") return Role::user;
  throw Error(ErrorCode::malformed_request, "unknown role: " + std::string(s));
}

nlohmann::json to_json(const FlowRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  nlohmann::json schema = nullptr;
  if (request.response_schema) {
    schema = {{"id", request.response_schema->id}, {"schema", request.response_schema->schema}};
  }
  return {
      {"flow", to_string(request.flow)},
      {"messages", std::move(messages)},
      {"response_schema", std::move(schema)},
      {"stream", request.stream},
      {"temperature", request.temperature},
      {"template_version", kTemplateVersion},
  };
}

FlowRequest flow_request_from_json(const nlohmann::json& j) {
  FlowRequest r;
  r.flow = flow_from_string(j.at("flow").get<std::string>());
  for (const auto& m : j.at("messages")) {
    r.messages.push_back(
        {role_from_string(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
  }
  if (const auto& s = j.at("response_schema"); !s.is_null()) {
    r.response_schema = ResponseSchema{s.at("id").get<std::string>(), s.at("schema")};
  }
  r.stream = j.at("stream").get<bool>();
  r.temperature = j.at("temperature").get<double>();
  return r;
}

}  // namespace pc::prompt
