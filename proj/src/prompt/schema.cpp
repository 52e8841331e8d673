#include "pc/prompt/schema.hpp"

#include "pc/error.hpp"

#include <algorithm>
#include <string>

namespace pc::prompt {

using nlohmann::json;

const ResponseSchema& widgets_schema() {
  static const ResponseSchema schema{
      "widgets.v1",
      json::parse(R"({
        "type": "object",
        "properties": {
          "widgets": {
            "type": "array",
            "minItems": 1,
            "maxItems": 4,
            "items": {
              "type": "object",
              "properties": {
                "label": {"type": "string", "minLength": 1},
                "value": {"type": "string"},
                "options": {
                  "type": "array",
                  "maxItems": 3,
                  "items": {"type": "string", "minLength": 1}
                }
              },
              "required": ["label", "value", "options"],
              "additionalProperties": false
            }
          }
        },
        "required": ["widgets"],
        "additionalProperties": false
      })")};
  return schema;
}

const ResponseSchema& options_schema() {
  static const ResponseSchema schema{
      "options.v1",
      json::parse(R"({
        "type": "object",
        "properties": {
          "options": {
            "type": "array",
            "minItems": 2,
            "maxItems": 2,
            "items": {"type": "string", "minLength": 1}
          }
        },
        "required": ["options"],
        "additionalProperties": false
      })")};
  return schema;
}

const ResponseSchema& extract_schema() {
  static const ResponseSchema schema{
      "extract.v1",
      json::parse(R"({
        "type": "object",
        "properties": {
          "value": {"type": "string", "minLength": 1}
        },
        "required": ["value"],
        "additionalProperties": false
      })")};
  return schema;
}

namespace {

[[noreturn]] void violation(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::schema_violation,
              "schema violation at " + (path.empty() ? std::string("/") : path) + ": " + message,
              {{"path", path.empty() ? "/" : path}, {"reason", message}});
}

std::string escape_pointer(const std::string& token) {
  std::string out;
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

std::size_t utf8_length(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

bool type_matches(const std::string& type, const json& instance) {
  if (type == "object") return instance.is_object();
  if (type == "array") return instance.is_array();
  if (type == "string") return instance.is_string();
  if (type == "boolean") return instance.is_boolean();
  if (type == "null") return instance.is_null();
  if (type == "integer") return instance.is_number_integer();
  if (type == "number") return instance.is_number();
  return false;
}

void validate_at(const json& schema, const json& instance, const std::string& path) {
  if (auto it = schema.find("type"); it != schema.end()) {
    const auto type = it->get<std::string>();
    if (!type_matches(type, instance)) violation(path, "expected " + type);
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    if (std::find(it->begin(), it->end(), instance) == it->end()) {
      violation(path, "value not in enum");
    }
  }
  if (instance.is_string()) {
    const auto len = utf8_length(instance.get_ref<const std::string&>());
    if (auto it = schema.find("minLength"); it != schema.end() && len < it->get<std::size_t>()) {
      violation(path, "string shorter than " + it->dump());
    }
    if (auto it = schema.find("maxLength"); it != schema.end() && len > it->get<std::size_t>()) {
      violation(path, "string longer than " + it->dump());
    }
  }
  if (instance.is_array()) {
    if (auto it = schema.find("minItems"); it != schema.end() && instance.size() < it->get<std::size_t>()) {
      violation(path, "fewer than " + it->dump() + " items");
    }
    if (auto it = schema.find("maxItems"); it != schema.end() && instance.size() > it->get<std::size_t>()) {
      violation(path, "more than " + it->dump() + " items");
    }
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < instance.size(); ++i) {
        validate_at(*it, instance[i], path + "/" + std::to_string(i));
      }
    }
  }
  if (instance.is_object()) {
    const auto props = schema.value("properties", json::object());
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it) {
        if (!instance.contains(key.get<std::string>())) {
          violation(path + "/" + escape_pointer(key.get<std::string>()), "missing required field");
        }
      }
    }
    const bool closed = schema.value("additionalProperties", true) == false;
    for (const auto& [key, value] : instance.items()) {
      const auto child = path + "/" + escape_pointer(key);
      if (auto p = props.find(key); p != props.end()) {
        validate_at(*p, value, child);
      } else if (closed) {
        violation(child, "unknown field");
      }
    }
  }
}

}  // namespace

void validate(const json& schema, const json& instance) { validate_at(schema, instance, ""); }

json wire_schema(const json& schema) {
  if (schema.is_object()) {
    json out = json::object();
    for (const auto& [key, value] : schema.items()) {
      if (key == "minItems" || key == "maxItems" || key == "minLength" || key == "maxLength") {
        continue;
      }
      out[key] = wire_schema(value);
    }
    return out;
  }
  if (schema.is_array()) {
    json out = json::array();
    for (const auto& v : schema) out.push_back(wire_schema(v));
    return out;
  }
  return schema;
}

}  // namespace pc::prompt
