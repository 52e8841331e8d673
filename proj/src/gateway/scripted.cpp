#include "pc/gateway/scripted.hpp"

#include "pc/error.hpp"
#include "pc/gateway/replay.hpp"

namespace pc::gateway {

using nlohmann::json;

ScriptedProvider::ScriptedProvider(std::vector<ScriptedReply> replies)
    : replies_(replies.begin(), replies.end()) {}

ScriptedReply ScriptedProvider::next(const prompt::FlowRequest& request, bool streaming) {
  const auto flow = std::string(prompt::to_string(request.flow));
  std::lock_guard lock(mutex_);
  if (replies_.empty()) {
    throw Error(ErrorCode::missing_fixture, "script exhausted at " + flow + " request", {{"flow", flow}});
  }
  auto& front = replies_.front();
  if (front.flow != request.flow) {
    throw Error(ErrorCode::missing_fixture,
                "script expected a " + std::string(prompt::to_string(front.flow)) + " request, got " + flow,
                {{"flow", flow}});
  }
  if (std::holds_alternative<StreamResponse>(front.response) != streaming) {
    throw Error(ErrorCode::missing_fixture, "script reply kind does not match " + flow + " request",
                {{"flow", flow}});
  }
  if (auto* seq = std::get_if<SequenceResponse>(&front.response); seq && seq->payloads.size() > 1) {
    ScriptedReply one{front.flow, StructuredResponse{seq->payloads.front()}};
    seq->payloads.erase(seq->payloads.begin());
    return one;
  }
  auto reply = std::move(front);
  replies_.pop_front();
  return reply;
}

json ScriptedProvider::complete(const prompt::FlowRequest& request) {
  const auto reply = next(request, false);
  if (const auto* s = std::get_if<StructuredResponse>(&reply.response)) return s->payload;
  return std::get<SequenceResponse>(reply.response).payloads.front();
}

void ScriptedProvider::stream(const prompt::FlowRequest& request, const ChunkSink& on_chunk) {
  play_stream(std::get<StreamResponse>(next(request, true).response), on_chunk);
}

std::size_t ScriptedProvider::remaining() const {
  std::lock_guard lock(mutex_);
  return replies_.size();
}

std::vector<ScriptedReply> scripted_replies_from_json(const json& j) {
  std::vector<ScriptedReply> out;
  try {
    for (const auto& r : j.at("replies")) {
      out.push_back({prompt::flow_from_string(r.at("flow").get<std::string>()),
                     fixture_response_from_json(r.at("response"))});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed_request, std::string("malformed reply script: ") + e.what());
  }
  return out;
}

}  // namespace pc::gateway
