#include "pc/gateway/replay.hpp"

#include "pc/error.hpp"
#include "pc/gateway/digest.hpp"

namespace pc::gateway {

void play_stream(const StreamResponse& s, const ChunkSink& on_chunk) {
  for (std::size_t i = 0; i < s.chunks.size(); ++i) {
    if (s.fault_after && i == *s.fault_after) break;
    on_chunk(s.chunks[i]);
  }
  if (s.fault_after) {
    throw Error(ErrorCode::provider_unavailable, "injected stream fault", {{"after_chunks", *s.fault_after}});
  }
}

ReplayProvider::ReplayProvider(Fixture fixture) : fixture_(std::move(fixture)) {}

const FixtureEntry& ReplayProvider::lookup(const prompt::FlowRequest& request,
                                           std::string& digest) const {
  digest = request_digest(request);
  const auto* entry = fixture_.find(digest);
  if (!entry) {
    throw Error(ErrorCode::missing_fixture,
                "no fixture entry for " + std::string(prompt::to_string(request.flow)) +
                    " request " + digest,
                {{"flow", prompt::to_string(request.flow)}, {"digest", digest}});
  }
  return *entry;
}

nlohmann::json ReplayProvider::complete(const prompt::FlowRequest& request) {
  std::string digest;
  const auto& entry = lookup(request, digest);
  std::size_t call;
  {
    std::lock_guard lock(mutex_);
    call = calls_[digest]++;
  }
  if (const auto* s = std::get_if<StructuredResponse>(&entry.response)) return s->payload;
  if (const auto* seq = std::get_if<SequenceResponse>(&entry.response)) {
    return seq->payloads[std::min(call, seq->payloads.size() - 1)];
  }
  throw Error(ErrorCode::missing_fixture, "fixture entry " + digest + " holds a stream",
              {{"flow", prompt::to_string(request.flow)}, {"digest", digest}});
}

void ReplayProvider::stream(const prompt::FlowRequest& request, const ChunkSink& on_chunk) {
  std::string digest;
  const auto& entry = lookup(request, digest);
  {
    std::lock_guard lock(mutex_);
    ++calls_[digest];
  }
  const auto* s = std::get_if<StreamResponse>(&entry.response);
  if (!s) {
    throw Error(ErrorCode::missing_fixture, "fixture entry " + digest + " is not a stream",
                {{"flow", prompt::to_string(request.flow)}, {"digest", digest}});
  }
  play_stream(*s, on_chunk);
}

std::size_t ReplayProvider::calls(const std::string& digest) const {
  std::lock_guard lock(mutex_);
  auto it = calls_.find(digest);
  return it == calls_.end() ? 0 : it->second;
}

}  // namespace pc::gateway
