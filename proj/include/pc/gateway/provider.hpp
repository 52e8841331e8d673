#pragma once

#include "pc/prompt/flow.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <string_view>

namespace pc::gateway {

using ChunkSink = std::function<void(std::string_view)>;

/// One model backend. Implementations are shareable across threads.
/// Failures are reported as pc::Error (provider_unavailable, auth_failure,
/// schema_violation for unparseable content, missing_fixture).
class Provider {
public:
  virtual ~Provider() = default;

  /// Returns the raw structured payload for a non-streaming request.
  virtual nlohmann::json complete(const prompt::FlowRequest& request) = 0;

  /// Delivers text chunks in arrival order; returns when the stream ends.
  virtual void stream(const prompt::FlowRequest& request, const ChunkSink& on_chunk) = 0;
};

}  // namespace pc::gateway
