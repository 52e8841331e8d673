#pragma once

#include "pc/gateway/config.hpp"
#include "pc/gateway/provider.hpp"

namespace pc::gateway {

/// Chat-completions client. Structured requests carry the response schema
/// in `response_format`; streaming requests decode server-sent events.
/// Connection failures, 429 and 5xx are retried with exponential backoff
/// up to `network_attempts` (streams only until the first chunk arrives).
class LiveProvider final : public Provider {
public:
  explicit LiveProvider(ProviderConfig config);

  nlohmann::json complete(const prompt::FlowRequest& request) override;
  void stream(const prompt::FlowRequest& request, const ChunkSink& on_chunk) override;

  /// Request body sent to /chat/completions.
  nlohmann::json request_body(const prompt::FlowRequest& request) const;

private:
  ProviderConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

}  // namespace pc::gateway
