#include "pc/gateway/gateway.hpp"

#include "pc/error.hpp"
#include "pc/prompt/parse.hpp"

#include <spdlog/spdlog.h>

namespace pc::gateway {

Gateway::Gateway(std::shared_ptr<Provider> provider, int max_retries)
    : provider_(std::move(provider)), max_retries_(max_retries < 0 ? 0 : max_retries) {}

StructuredResult Gateway::complete_structured(const prompt::FlowRequest& request,
                                              const PayloadValidator& validate) {
  if (request.stream) {
    throw Error(ErrorCode::internal_error, "complete_structured called with a streaming request");
  }
  const auto check = validate ? validate : [&](const nlohmann::json& payload) {
    prompt::check_structured_payload(request.flow, payload);
  };
  nlohmann::json last_violation;
  const int budget = max_retries_ + 1;
  for (int attempt = 1; attempt <= budget; ++attempt) {
    auto payload = provider_->complete(request);
    try {
      check(payload);
      if (attempt > 1) {
        spdlog::info("{}: valid payload after {} retries", prompt::to_string(request.flow), attempt - 1);
      }
      return {std::move(payload), attempt};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::schema_violation && e.code() != ErrorCode::duplicate_options) throw;
      spdlog::warn("{}: attempt {}/{} rejected: {}", prompt::to_string(request.flow), attempt, budget,
                   e.what());
      last_violation = {{"code", to_string(e.code())}, {"message", e.what()}, {"detail", e.detail()}};
    }
  }
  throw Error(ErrorCode::schema_violation_exhausted,
              "no valid " + std::string(prompt::to_string(request.flow)) + " payload after " +
                  std::to_string(budget) + " attempts",
              {{"attempts", budget}, {"last_violation", last_violation}});
}

std::string Gateway::complete_streaming(const prompt::FlowRequest& request, const StreamSink& sink) {
  if (!request.stream) {
    throw Error(ErrorCode::internal_error, "complete_streaming called with a structured request");
  }
  std::string text;
  try {
    provider_->stream(request, [&](std::string_view chunk) {
      text += chunk;
      sink(StreamEvent{StreamEventKind::delta, std::string(chunk), {}});
    });
  } catch (const Error& e) {
    sink(StreamEvent{StreamEventKind::error, e.what(), std::string(to_string(e.code()))});
    auto detail = e.detail().is_object() ? e.detail() : nlohmann::json::object();
    detail["partial"] = text;
    throw Error(e.code(), e.what(), std::move(detail));
  }
  sink(StreamEvent{StreamEventKind::done, text, {}});
  return text;
}

}  // namespace pc::gateway
