#pragma once

#include "pc/gateway/fixture.hpp"
#include "pc/gateway/provider.hpp"

#include <deque>
#include <mutex>

namespace pc::gateway {

struct ScriptedReply {
  prompt::FlowKind flow = prompt::FlowKind::apply_prompt;
  FixtureResponse response;
};

/// Answers calls in order from a list of replies, without looking at the
/// request beyond its flow. A sequence reply serves one payload per call.
/// Used to author fixtures (wrapped in a RecordingProvider) and in tests.
class ScriptedProvider final : public Provider {
public:
  explicit ScriptedProvider(std::vector<ScriptedReply> replies);

  nlohmann::json complete(const prompt::FlowRequest& request) override;
  void stream(const prompt::FlowRequest& request, const ChunkSink& on_chunk) override;

  std::size_t remaining() const;

private:
  ScriptedReply next(const prompt::FlowRequest& request, bool streaming);

  mutable std::mutex mutex_;
  std::deque<ScriptedReply> replies_;
};

/// {"replies": [{"flow": ..., "response": <fixture response>}, ...]}
std::vector<ScriptedReply> scripted_replies_from_json(const nlohmann::json& j);

}  // namespace pc::gateway
