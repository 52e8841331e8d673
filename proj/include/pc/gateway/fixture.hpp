#pragma once

#include "pc/prompt/flow.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pc::gateway {

/// A single structured payload, returned on every call.
struct StructuredResponse {
  nlohmann::json payload;
  friend bool operator==(const StructuredResponse&, const StructuredResponse&) = default;
};

/// Successive calls with the same digest receive successive payloads; the
/// last one repeats once the list is exhausted.
struct SequenceResponse {
  std::vector<nlohmann::json> payloads;
  friend bool operator==(const SequenceResponse&, const SequenceResponse&) = default;
};

/// Stream chunks. With `fault_after` set, the provider fails with
/// provider_unavailable after emitting that many chunks.
struct StreamResponse {
  std::vector<std::string> chunks;
  std::optional<std::size_t> fault_after;
  friend bool operator==(const StreamResponse&, const StreamResponse&) = default;
};

using FixtureResponse = std::variant<StructuredResponse, SequenceResponse, StreamResponse>;

struct FixtureEntry {
  prompt::FlowKind flow = prompt::FlowKind::apply_prompt;
  std::string request_digest;
  nlohmann::json request;  // canonical request, or null
  FixtureResponse response;
  friend bool operator==(const FixtureEntry&, const FixtureEntry&) = default;
};

/// Recorded request/response pairs. Digests are unique within a fixture.
struct Fixture {
  std::vector<FixtureEntry> entries;

  const FixtureEntry* find(std::string_view digest) const noexcept;
  friend bool operator==(const Fixture&, const Fixture&) = default;
};

nlohmann::json to_json(const FixtureResponse& response);
/// Throws Error(malformed_request).
FixtureResponse fixture_response_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Fixture& fixture);
/// Throws Error(malformed_request) on bad shape or duplicate digests.
Fixture fixture_from_json(const nlohmann::json& j);

/// Throws Error(missing_fixture) when the file does not exist.
Fixture load_fixture(const std::filesystem::path& path);
/// Atomic write-then-rename. Throws Error(fixture_write_error).
void save_fixture(const std::filesystem::path& path, const Fixture& fixture);

FixtureEntry structured_entry(const prompt::FlowRequest& request, nlohmann::json payload);
FixtureEntry sequence_entry(const prompt::FlowRequest& request, std::vector<nlohmann::json> payloads);
FixtureEntry stream_entry(const prompt::FlowRequest& request, std::vector<std::string> chunks,
                          std::optional<std::size_t> fault_after = std::nullopt);

}  // namespace pc::gateway
