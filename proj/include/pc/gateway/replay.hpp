#pragma once

#include "pc/gateway/fixture.hpp"
#include "pc/gateway/provider.hpp"

#include <map>
#include <mutex>

namespace pc::gateway {

/// Emits the chunks of `s`, honouring fault_after.
void play_stream(const StreamResponse& s, const ChunkSink& on_chunk);

/// Serves recorded fixture entries by request digest. Unknown digests raise
/// Error(missing_fixture) naming the flow and digest.
class ReplayProvider final : public Provider {
public:
  explicit ReplayProvider(Fixture fixture);

  nlohmann::json complete(const prompt::FlowRequest& request) override;
  void stream(const prompt::FlowRequest& request, const ChunkSink& on_chunk) override;

  /// Number of calls served per digest.
  std::size_t calls(const std::string& digest) const;

private:
  const FixtureEntry& lookup(const prompt::FlowRequest& request, std::string& digest) const;

  Fixture fixture_;
  mutable std::mutex mutex_;
  std::map<std::string, std::size_t> calls_;
};

}  // namespace pc::gateway
