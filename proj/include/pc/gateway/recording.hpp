#pragma once

#include "pc/gateway/fixture.hpp"
#include "pc/gateway/provider.hpp"

#include <filesystem>
#include <memory>
#include <mutex>

namespace pc::gateway {

/// Proxies to `inner` and appends every request/response pair to the
/// fixture file. Re-recording the same request replaces its entry; a digest
/// that already belongs to a different request raises
/// Error(fixture_write_error).
class RecordingProvider final : public Provider {
public:
  RecordingProvider(std::shared_ptr<Provider> inner, std::filesystem::path fixture_path);

  nlohmann::json complete(const prompt::FlowRequest& request) override;
  void stream(const prompt::FlowRequest& request, const ChunkSink& on_chunk) override;

private:
  void record(FixtureEntry entry);

  std::shared_ptr<Provider> inner_;
  std::filesystem::path path_;
  std::mutex mutex_;
  Fixture fixture_;
};

}  // namespace pc::gateway
