#pragma once

#include "pc/gateway/provider.hpp"
#include "pc/prompt/flow.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace pc::gateway {

struct StructuredResult {
  nlohmann::json payload;
  int attempts = 1;
};

enum class StreamEventKind { delta, done, error };

/// A stream is zero or more deltas followed by exactly one done or error.
struct StreamEvent {
  StreamEventKind kind = StreamEventKind::delta;
  std::string payload;           // delta text; final text for done; message for error
  std::string error_code;        // set for error
};

using StreamSink = std::function<void(const StreamEvent&)>;

/// Throws Error(schema_violation) or Error(duplicate_options) for a payload
/// that should be retried.
using PayloadValidator = std::function<void(const nlohmann::json&)>;

class Gateway {
public:
  Gateway(std::shared_ptr<Provider> provider, int max_retries);

  /// Sends a non-streaming request, retrying with identical input while the
  /// validator rejects the payload. Throws Error(schema_violation_exhausted)
  /// after max_retries + 1 invalid attempts; its detail carries `attempts`.
  StructuredResult complete_structured(const prompt::FlowRequest& request,
                                       const PayloadValidator& validate = {});

  /// Forwards chunks as delta events and finishes with done. On failure an
  /// error event follows the deltas already sent, and the Error is rethrown
  /// with the partial text in detail["partial"].
  std::string complete_streaming(const prompt::FlowRequest& request, const StreamSink& sink);

  int max_retries() const noexcept { return max_retries_; }
  Provider& provider() noexcept { return *provider_; }

private:
  std::shared_ptr<Provider> provider_;
  int max_retries_;
};

}  // namespace pc::gateway
