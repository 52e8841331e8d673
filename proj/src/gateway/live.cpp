#include "pc/gateway/live.hpp"

#include "pc/error.hpp"
#include "pc/gateway/sse.hpp"
#include "pc/prompt/schema.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <regex>
#include <thread>

namespace pc::gateway {

using nlohmann::json;

namespace {

struct HttpOutcome {
  int status = 0;
  std::string body;
  httplib::Error error = httplib::Error::Success;
};

bool retryable(const HttpOutcome& r) {
  return r.error != httplib::Error::Success || r.status == 429 || r.status >= 500;
}

[[noreturn]] void raise_for(const HttpOutcome& r, int attempts) {
  if (r.error != httplib::Error::Success) {
    throw Error(ErrorCode::provider_unavailable,
                "model endpoint unreachable: " + httplib::to_string(r.error),
                {{"attempts", attempts}});
  }
  if (r.status == 401 || r.status == 403) {
    throw Error(ErrorCode::auth_failure, "model endpoint rejected credentials",
                {{"status", r.status}});
  }
  throw Error(ErrorCode::provider_unavailable,
              "model endpoint returned HTTP " + std::to_string(r.status),
              {{"status", r.status}, {"attempts", attempts}, {"body", r.body.substr(0, 512)}});
}

std::string schema_name(const std::string& id) {
  std::string out;
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
  return out;
}

}  // namespace

LiveProvider::LiveProvider(ProviderConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, url)) {
    throw Error(ErrorCode::malformed_request, "invalid base URL: " + config_.base_url);
  }
  scheme_host_port_ = m[1].str();
  path_prefix_ = m[2].matched ? m[2].str() : "";
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

json LiveProvider::request_body(const prompt::FlowRequest& request) const {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", prompt::to_string(m.role)}, {"content", m.content}});
  }
  json body = {{"model", config_.model_name},
               {"messages", std::move(messages)},
               {"temperature", request.temperature}};
  if (request.response_schema) {
    body["response_format"] = {
        {"type", "json_schema"},
        {"json_schema",
         {{"name", schema_name(request.response_schema->id)},
          {"schema", prompt::wire_schema(request.response_schema->schema)},
          {"strict", true}}}};
  }
  if (request.stream) body["stream"] = true;
  return body;
}

json LiveProvider::complete(const prompt::FlowRequest& request) {
  const auto body = request_body(request).dump();
  HttpOutcome outcome;
  int attempt = 0;
  for (; attempt < std::max(1, config_.network_attempts); ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 1)));
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_bearer_token_auth(config_.api_key);
    auto res = client.Post(path_prefix_ + "/chat/completions", body, "application/json");
    outcome = {};
    if (!res) {
      outcome.error = res.error();
    } else {
      outcome.status = res->status;
      outcome.body = res->body;
    }
    if (outcome.error == httplib::Error::Success && outcome.status == 200) break;
    if (!retryable(outcome)) raise_for(outcome, attempt + 1);
    spdlog::warn("model endpoint attempt {} failed (status {})", attempt + 1, outcome.status);
  }
  if (outcome.error != httplib::Error::Success || outcome.status != 200) raise_for(outcome, attempt);

  json response;
  try {
    response = json::parse(outcome.body);
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::provider_unavailable, "model endpoint returned non-JSON body");
  }
  const auto* message = response.contains("choices") && response["choices"].is_array() &&
                                !response["choices"].empty()
                            ? &response["choices"][0]["message"]
                            : nullptr;
  if (!message || !message->is_object()) {
    throw Error(ErrorCode::provider_unavailable, "model response has no message");
  }
  if (message->contains("refusal") && (*message)["refusal"].is_string()) {
    throw Error(ErrorCode::schema_violation, "model refused: " + (*message)["refusal"].get<std::string>(),
                {{"path", "/"}, {"reason", "refusal"}});
  }
  const auto content = message->value("content", json());
  if (!content.is_string()) {
    throw Error(ErrorCode::schema_violation, "model message has no text content",
                {{"path", "/"}, {"reason", "missing content"}});
  }
  try {
    return json::parse(content.get<std::string>());
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::schema_violation, "model content is not JSON",
                {{"path", "/"}, {"reason", "unparseable content"}});
  }
}

void LiveProvider::stream(const prompt::FlowRequest& request, const ChunkSink& on_chunk) {
  const auto body = request_body(request).dump();
  int attempt = 0;
  while (true) {
    ++attempt;
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);

    httplib::Request req;
    req.method = "POST";
    req.path = path_prefix_ + "/chat/completions";
    req.headers = {{"Authorization", "Bearer " + config_.api_key},
                   {"Accept", "text/event-stream"}};
    req.body = body;
    req.set_header("Content-Type", "application/json");

    HttpOutcome outcome;
    SseDecoder decoder;
    bool delivered = false;
    bool finished = false;
    std::optional<Error> parse_failure;
    req.response_handler = [&](const httplib::Response& r) {
      outcome.status = r.status;
      return true;
    };
    req.content_receiver = [&](const char* data, size_t len, uint64_t, uint64_t) {
      if (outcome.status != 200) {
        outcome.body.append(data, len);
        return true;
      }
      for (const auto& ev : decoder.feed(std::string_view(data, len))) {
        if (ev.data == "[DONE]") {
          finished = true;
          continue;
        }
        try {
          const auto j = json::parse(ev.data);
          const auto& choices = j.at("choices");
          if (choices.empty()) continue;
          const auto& delta = choices[0].value("delta", json::object());
          if (auto c = delta.find("content"); c != delta.end() && c->is_string()) {
            const auto& text = c->get_ref<const std::string&>();
            if (!text.empty()) {
              delivered = true;
              on_chunk(text);
            }
          }
        } catch (const json::exception& e) {
          parse_failure = Error(ErrorCode::provider_unavailable,
                                std::string("malformed stream event: ") + e.what());
          return false;
        }
      }
      return true;
    };

    auto res = client.send(req);
    if (parse_failure) throw *parse_failure;
    if (!res) outcome.error = res.error();
    if (outcome.error == httplib::Error::Success && outcome.status == 200) {
      if (!finished) spdlog::debug("stream closed without [DONE]");
      return;
    }
    if (delivered) {
      throw Error(ErrorCode::provider_unavailable, "stream interrupted: " + httplib::to_string(outcome.error));
    }
    if (!retryable(outcome) || attempt >= std::max(1, config_.network_attempts)) {
      raise_for(outcome, attempt);
    }
    spdlog::warn("stream attempt {} failed (status {})", attempt, outcome.status);
    std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 1)));
  }
}

}  // namespace pc::gateway
