#pragma once

#include "pc/prompt/flow.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace pc::gateway {

std::string sha256_hex(std::string_view bytes);

/// {flow, messages, schema_id, temperature} with sorted keys.
nlohmann::json canonical_request(const prompt::FlowRequest& request);

/// SHA-256 of the compact UTF-8 serialization of an already canonical
/// request object. Key order in the input does not matter.
std::string digest_of(const nlohmann::json& canonical);

std::string request_digest(const prompt::FlowRequest& request);

}  // namespace pc::gateway
