#pragma once

#include <nlohmann/json.hpp>

#include "pc/prompt/flow.hpp"

namespace pc::prompt {

/// {"widgets": [{label, value, options[<=3]}] (1..4 entries)}
const ResponseSchema& widgets_schema();
/// {"options": [string, string]}
const ResponseSchema& options_schema();
/// {"value": string}
const ResponseSchema& extract_schema();

/// Validates `instance` against the subset of JSON Schema used by the
/// response schemas: type, properties, required, additionalProperties,
/// items, minItems, maxItems, minLength, maxLength, enum.
/// Throws Error(schema_violation) whose detail carries a JSON Pointer
/// `path` to the offending element.
void validate(const nlohmann::json& schema, const nlohmann::json& instance);

/// Copy of `schema` without the size keywords some hosted structured-output
/// implementations refuse. Sizes are still enforced locally by validate().
nlohmann::json wire_schema(const nlohmann::json& schema);

}  // namespace pc::prompt
