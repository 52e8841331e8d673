#include "pc/cli/backend.hpp"

#include "pc/error.hpp"
#include "pc/gateway/sse.hpp"
#include "pc/store/serialization.hpp"

#include <httplib.h>

#include <fmt/format.h>

namespace pc::cli {
namespace {

using nlohmann::json;

class InProcessBackend final : public Backend {
public:
  explicit InProcessBackend(service::Service& s) : svc_(s) {}

  core::Workspace create_workspace(const std::string& name) override { return svc_.create_workspace(name); }
  json list_workspaces() override {
    json out = json::array();
    for (const auto& s : svc_.list_workspaces()) out.push_back(store::to_json(s));
    return out;
  }
  core::Workspace get_workspace(const std::string& id) override { return svc_.get_workspace(id); }
  core::Workspace rename_workspace(const std::string& id, const std::string& name) override {
    return svc_.rename_workspace(id, name);
  }
  core::Workspace duplicate_workspace(const std::string& id, const std::string& name) override {
    return svc_.duplicate_workspace(id, name);
  }
  void delete_workspace(const std::string& id) override { svc_.delete_workspace(id); }

  core::ControlWidget create_widget(const std::string& ws, core::Vec2 position) override {
    return svc_.create_widget(ws, position);
  }
  core::ControlWidget update_widget(const std::string& ws, const std::string& wid,
                                    const service::WidgetPatch& patch) override {
    return svc_.update_widget(ws, wid, patch);
  }
  core::ControlWidget move_widget(const std::string& ws, const std::string& wid, core::Zone zone,
                                  std::optional<core::Vec2> position) override {
    return svc_.move_widget(ws, wid, zone, position);
  }
  void delete_widget(const std::string& ws, const std::string& wid) override { svc_.delete_widget(ws, wid); }
  core::ControlWidget save_input(const std::string& ws, const std::string& wid) override {
    return svc_.save_input(ws, wid);
  }
  core::ControlWidget select_option(const std::string& ws, const std::string& wid, std::size_t index) override {
    return svc_.select_option(ws, wid, index);
  }
  core::ControlWidget add_option(const std::string& ws, const std::string& wid, const std::string& option) override {
    return svc_.add_option(ws, wid, option);
  }

  std::vector<core::ControlWidget> generate_widgets(const std::string& ws,
                                                    std::optional<std::string> guiding_prompt) override {
    return svc_.generate_widgets(ws, std::move(guiding_prompt));
  }
  core::ControlWidget suggest_options(const std::string& ws, const std::string& wid,
                                      std::optional<std::string> guiding_prompt) override {
    return svc_.suggest_options(ws, wid, std::move(guiding_prompt));
  }
  core::ControlWidget extract_value(const std::string& ws, const std::string& wid) override {
    return svc_.extract_value(ws, wid);
  }

  core::Document put_document(const std::string& ws, const std::string& content, bool checkpoint) override {
    return svc_.put_document(ws, content, checkpoint);
  }
  core::Document revert_document(const std::string& ws, std::size_t index) override {
    return svc_.revert_document(ws, index);
  }
  StreamOutcome rephrase(const std::string& ws, const gateway::ChunkSink& on_delta) override {
    return finish(svc_.begin_rephrase(ws)->run(on_delta));
  }
  StreamOutcome prompt(const std::string& ws, const std::string& prompt,
                       const gateway::ChunkSink& on_delta) override {
    return finish(svc_.begin_prompt(ws, prompt)->run(on_delta));
  }

private:
  static StreamOutcome finish(const core::Document& doc) { return {doc.content, doc.history.size()}; }

  service::Service& svc_;
};

std::string encode_segment(const std::string& s) {
  std::string out;
  for (const unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += fmt::format("%{:02X}", c);
    }
  }
  return out;
}

// Unknown codes from a newer server degrade to internal_error.
ErrorCode code_or_internal(const std::string& name) {
  try {
    return error_code_from_string(name);
  } catch (const std::invalid_argument&) {
    return ErrorCode::internal_error;
  }
}

[[noreturn]] void raise_from_body(int status, const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    throw Error(ErrorCode::internal_error, fmt::format("HTTP {} with unparseable body", status));
  }
  if (!j.is_object()) throw Error(ErrorCode::internal_error, fmt::format("HTTP {} without an error object", status));
  throw Error(code_or_internal(j.value("code", "internal_error")), j.value("message", ""),
              j.value("detail", json::object()));
}

class HttpBackend final : public Backend {
public:
  explicit HttpBackend(const std::string& base_url) : client_(base_url) {
    client_.set_read_timeout(std::chrono::seconds(120));
  }

  core::Workspace create_workspace(const std::string& name) override {
    return store::workspace_from_json(call("POST", "/workspaces", {{"name", name}}));
  }
  json list_workspaces() override { return call("GET", "/workspaces"); }
  core::Workspace get_workspace(const std::string& id) override {
    return store::workspace_from_json(call("GET", ws_path(id)));
  }
  core::Workspace rename_workspace(const std::string& id, const std::string& name) override {
    return store::workspace_from_json(call("PATCH", ws_path(id), {{"name", name}}));
  }
  core::Workspace duplicate_workspace(const std::string& id, const std::string& name) override {
    return store::workspace_from_json(call("POST", ws_path(id) + ":duplicate", {{"name", name}}));
  }
  void delete_workspace(const std::string& id) override { call("DELETE", ws_path(id)); }

  core::ControlWidget create_widget(const std::string& ws, core::Vec2 position) override {
    return widget(call("POST", ws_path(ws) + "/widgets", {{"position", store::to_json(position)}}));
  }
  core::ControlWidget update_widget(const std::string& ws, const std::string& wid,
                                    const service::WidgetPatch& patch) override {
    json body = json::object();
    if (patch.title) body["title"] = *patch.title;
    if (patch.value) body["value"] = *patch.value;
    if (patch.size) body["size"] = store::to_json(*patch.size);
    return widget(call("PATCH", widget_path(ws, wid), body));
  }
  core::ControlWidget move_widget(const std::string& ws, const std::string& wid, core::Zone zone,
                                  std::optional<core::Vec2> position) override {
    json body{{"zone", core::to_string(zone)}};
    if (position) body["position"] = store::to_json(*position);
    return widget(call("POST", widget_path(ws, wid) + ":move", body));
  }
  void delete_widget(const std::string& ws, const std::string& wid) override {
    call("DELETE", widget_path(ws, wid));
  }
  core::ControlWidget save_input(const std::string& ws, const std::string& wid) override {
    return widget(call("POST", widget_path(ws, wid) + ":save-input"));
  }
  core::ControlWidget select_option(const std::string& ws, const std::string& wid, std::size_t index) override {
    return widget(call("POST", widget_path(ws, wid) + ":select", {{"index", index}}));
  }
  core::ControlWidget add_option(const std::string& ws, const std::string& wid, const std::string& option) override {
    return widget(call("POST", widget_path(ws, wid) + "/options", {{"option", option}}));
  }

  std::vector<core::ControlWidget> generate_widgets(const std::string& ws,
                                                    std::optional<std::string> guiding_prompt) override {
    json body = json::object();
    if (guiding_prompt) body["guiding_prompt"] = *guiding_prompt;
    std::vector<core::ControlWidget> out;
    for (const auto& w : call("POST", ws_path(ws) + "/widgets:generate", body)) out.push_back(widget(w));
    return out;
  }
  core::ControlWidget suggest_options(const std::string& ws, const std::string& wid,
                                      std::optional<std::string> guiding_prompt) override {
    json body = json::object();
    if (guiding_prompt) body["guiding_prompt"] = *guiding_prompt;
    return widget(call("POST", widget_path(ws, wid) + "/options:suggest", body));
  }
  core::ControlWidget extract_value(const std::string& ws, const std::string& wid) override {
    return widget(call("POST", widget_path(ws, wid) + "/options:extract"));
  }

  core::Document put_document(const std::string& ws, const std::string& content, bool checkpoint) override {
    return store::document_from_json(
        call("PUT", ws_path(ws) + "/document", {{"content", content}, {"checkpoint", checkpoint}}));
  }
  core::Document revert_document(const std::string& ws, std::size_t index) override {
    return store::document_from_json(call("POST", ws_path(ws) + "/document:revert", {{"index", index}}));
  }
  StreamOutcome rephrase(const std::string& ws, const gateway::ChunkSink& on_delta) override {
    return stream(ws_path(ws) + "/document:rephrase", json::object(), on_delta);
  }
  StreamOutcome prompt(const std::string& ws, const std::string& prompt,
                       const gateway::ChunkSink& on_delta) override {
    return stream(ws_path(ws) + "/document:prompt", {{"prompt", prompt}}, on_delta);
  }

private:
  static std::string ws_path(const std::string& id) { return "/workspaces/" + encode_segment(id); }
  static std::string widget_path(const std::string& ws, const std::string& wid) {
    return ws_path(ws) + "/widgets/" + encode_segment(wid);
  }
  static core::ControlWidget widget(const json& j) { return store::widget_from_json(j); }

  static Error unreachable(const httplib::Result& r) {
    return Error(ErrorCode::provider_unavailable, "cannot reach server: " + httplib::to_string(r.error()));
  }

  json call(const std::string& method, const std::string& path, const json& body = json::object()) {
    const auto payload = body.dump();
    httplib::Result r;
    if (method == "GET") r = client_.Get(path);
    else if (method == "POST") r = client_.Post(path, payload, "application/json");
    else if (method == "PUT") r = client_.Put(path, payload, "application/json");
    else if (method == "PATCH") r = client_.Patch(path, payload, "application/json");
    else r = client_.Delete(path, payload, "application/json");
    if (!r) throw unreachable(r);
    if (r->status >= 400) raise_from_body(r->status, r->body);
    try {
      return json::parse(r->body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::internal_error, std::string("unparseable response: ") + e.what());
    }
  }

  StreamOutcome stream(const std::string& path, const json& body, const gateway::ChunkSink& on_delta) {
    httplib::Request req;
    req.method = "POST";
    req.path = path;
    req.body = body.dump();
    req.set_header("Content-Type", "application/json");
    req.set_header("Accept", "text/event-stream");

    int status = 0;
    std::string raw;  // error bodies
    gateway::SseDecoder decoder;
    std::optional<StreamOutcome> done;
    std::optional<Error> failure;
    req.response_handler = [&](const httplib::Response& res) {
      status = res.status;
      return true;
    };
    req.content_receiver = [&](const char* data, std::size_t n, std::uint64_t, std::uint64_t) {
      if (status != 200) {
        raw.append(data, n);
        return true;
      }
      for (const auto& ev : decoder.feed(std::string_view(data, n))) {
        const auto payload = json::parse(ev.data);
        if (ev.event == "delta") {
          on_delta(payload.get<std::string>());
        } else if (ev.event == "done") {
          done = StreamOutcome{payload.at("content").get<std::string>(),
                               payload.at("history_length").get<std::size_t>()};
        } else if (ev.event == "error") {
          failure.emplace(code_or_internal(payload.at("code").get<std::string>()),
                          payload.value("message", ""), json{{"partial", payload.value("partial", "")}});
        }
      }
      return true;
    };
    const auto r = client_.send(req);
    if (!r) throw unreachable(r);
    if (status != 200) raise_from_body(status, raw);
    if (failure) throw *failure;
    if (!done) throw Error(ErrorCode::provider_unavailable, "stream ended without a done event");
    return *done;
  }

  httplib::Client client_;
};

}  // namespace

std::unique_ptr<Backend> make_in_process_backend(service::Service& service) {
  return std::make_unique<InProcessBackend>(service);
}

std::unique_ptr<Backend> make_http_backend(const std::string& base_url) {
  return std::make_unique<HttpBackend>(base_url);
}

}  // namespace pc::cli
