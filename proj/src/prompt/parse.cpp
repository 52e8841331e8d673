#include "pc/prompt/parse.hpp"

#include "pc/core/text.hpp"
#include "pc/error.hpp"
#include "pc/prompt/schema.hpp"

namespace pc::prompt {

using nlohmann::json;

std::vector<core::WidgetSpec> parse_widgets_response(const json& payload) {
  validate(widgets_schema().schema, payload);
  std::vector<core::WidgetSpec> out;
  for (const auto& w : payload.at("widgets")) {
    out.push_back({w.at("label").get<std::string>(), w.at("value").get<std::string>(),
                   w.at("options").get<std::vector<std::string>>()});
  }
  return out;
}

std::array<std::string, 2> parse_options_response(const json& payload) {
  validate(options_schema().schema, payload);
  const auto& options = payload.at("options");
  std::array<std::string, 2> out{core::trim(options[0].get<std::string>()),
                                 core::trim(options[1].get<std::string>())};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].empty()) {
      throw Error(ErrorCode::schema_violation, "option is blank",
                  {{"path", "/options/" + std::to_string(i)}, {"reason", "blank string"}});
    }
  }
  if (out[0] == out[1]) {
    throw Error(ErrorCode::duplicate_options, "both suggested options are equal",
                {{"options", out}});
  }
  return out;
}

std::string parse_extract_response(const json& payload) {
  validate(extract_schema().schema, payload);
  auto value = core::trim(payload.at("value").get<std::string>());
  if (value.empty()) {
    throw Error(ErrorCode::schema_violation, "extracted value is blank",
                {{"path", "/value"}, {"reason", "blank string"}});
  }
  return value;
}

json widgets_payload(const std::vector<core::WidgetSpec>& specs) {
  json widgets = json::array();
  for (const auto& s : specs) {
    widgets.push_back({{"label", s.label}, {"value", s.value}, {"options", s.options}});
  }
  return {{"widgets", std::move(widgets)}};
}

void check_structured_payload(FlowKind flow, const json& payload) {
  switch (flow) {
    case FlowKind::generate_widgets: parse_widgets_response(payload); return;
    case FlowKind::generate_options: parse_options_response(payload); return;
    case FlowKind::extract_value: parse_extract_response(payload); return;
    case FlowKind::apply_widgets:
    case FlowKind::apply_prompt: break;
  }
  throw Error(ErrorCode::internal_error,
              "flow " + std::string(to_string(flow)) + " has no structured payload");
}

}  // namespace pc::prompt
