#include "pc/gateway/recording.hpp"

#include "pc/error.hpp"
#include "pc/gateway/digest.hpp"

namespace pc::gateway {

RecordingProvider::RecordingProvider(std::shared_ptr<Provider> inner,
                                     std::filesystem::path fixture_path)
    : inner_(std::move(inner)), path_(std::move(fixture_path)) {
  if (std::filesystem::exists(path_)) fixture_ = load_fixture(path_);
}

void RecordingProvider::record(FixtureEntry entry) {
  std::lock_guard lock(mutex_);
  for (auto& existing : fixture_.entries) {
    if (existing.request_digest != entry.request_digest) continue;
    if (!existing.request.is_null() && existing.request != entry.request) {
      throw Error(ErrorCode::fixture_write_error,
                  "digest " + entry.request_digest + " already records a different request",
                  {{"digest", entry.request_digest}});
    }
    existing = std::move(entry);
    save_fixture(path_, fixture_);
    return;
  }
  fixture_.entries.push_back(std::move(entry));
  save_fixture(path_, fixture_);
}

nlohmann::json RecordingProvider::complete(const prompt::FlowRequest& request) {
  auto payload = inner_->complete(request);
  record(structured_entry(request, payload));
  return payload;
}

void RecordingProvider::stream(const prompt::FlowRequest& request, const ChunkSink& on_chunk) {
  std::vector<std::string> chunks;
  inner_->stream(request, [&](std::string_view chunk) {
    chunks.emplace_back(chunk);
    on_chunk(chunk);
  });
  record(stream_entry(request, std::move(chunks)));
}

}  // namespace pc::gateway
