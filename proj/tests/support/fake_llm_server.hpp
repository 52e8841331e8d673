#pragma once

// Minimal chat-completions endpoint on localhost for exercising the live
// client without network access.

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pc::testing {

struct FakeReply {
  int status = 200;
  // Structured reply: the JSON payload the model "writes" as message content.
  nlohmann::json content;
  // Streaming reply: chunks sent as SSE deltas.
  std::vector<std::string> chunks;
  bool drop_mid_stream = false;  // close the connection after the chunks, without [DONE]
};

class FakeLlmServer {
public:
  using Responder = std::function<FakeReply(const nlohmann::json& request_body)>;

  explicit FakeLlmServer(Responder responder) : responder_(std::move(responder)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      {
        std::lock_guard lock(mutex_);
        requests_.push_back(body);
        auth_headers_.push_back(req.get_header_value("Authorization"));
      }
      const auto reply = responder_(body);
      res.status = reply.status;
      if (reply.status != 200) {
        res.set_content(R"({"error": {"message": "nope"}})", "application/json");
        return;
      }
      if (!body.value("stream", false)) {
        nlohmann::json out = {{"choices", {{{"message", {{"role", "assistant"}, {"content", reply.content.dump()}}}}}}};
        res.set_content(out.dump(), "application/json");
        return;
      }
      auto chunks = std::make_shared<std::vector<std::string>>(reply.chunks);
      const bool drop = reply.drop_mid_stream;
      res.set_chunked_content_provider("text/event-stream", [chunks, drop](size_t, httplib::DataSink& sink) {
        for (const auto& c : *chunks) {
          nlohmann::json ev = {{"choices", {{{"delta", {{"content", c}}}}}}};
          const auto frame = "data: " + ev.dump() + "\n\n";
          sink.write(frame.data(), frame.size());
        }
        if (drop) return false;
        const std::string done = "data: [DONE]\n\n";
        sink.write(done.data(), done.size());
        sink.done();
        return true;
      });
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeLlmServer() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  std::vector<nlohmann::json> requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }

  std::vector<std::string> auth_headers() const {
    std::lock_guard lock(mutex_);
    return auth_headers_;
  }

private:
  Responder responder_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::vector<nlohmann::json> requests_;
  std::vector<std::string> auth_headers_;
};

}  // namespace pc::testing
