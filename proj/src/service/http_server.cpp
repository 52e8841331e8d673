#include "pc/service/http_server.hpp"

#include "pc/error.hpp"
#include "pc/gateway/sse.hpp"
#include "pc/store/serialization.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace pc::service {

using nlohmann::json;

json error_body(const Error& error) {
  return {{"code", std::string(to_string(error.code()))},
          {"message", error.what()},
          {"detail", error.detail().is_null() ? json::object() : error.detail()}};
}

std::string wire_dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

namespace {

// ---- request decoding ----

[[noreturn]] void malformed(const std::string& message, json detail = json::object()) {
  throw Error(ErrorCode::malformed_request, message, std::move(detail));
}

json body_of(const httplib::Request& req) {
  if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  json j;
  try {
    j = json::parse(req.body);
  } catch (const json::parse_error& e) {
    malformed("request body is not valid JSON", {{"reason", e.what()}});
  }
  if (!j.is_object()) malformed("request body must be a JSON object");
  return j;
}

const json* member(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return nullptr;
  return &*it;
}

std::optional<std::string> opt_string(const json& body, const char* key) {
  const auto* v = member(body, key);
  if (!v) return std::nullopt;
  if (!v->is_string()) malformed(std::string(key) + " must be a string", {{"field", key}});
  return v->get<std::string>();
}

std::string req_string(const json& body, const char* key) {
  auto v = opt_string(body, key);
  if (!v) malformed(std::string(key) + " is required", {{"field", key}});
  return *v;
}

bool opt_bool(const json& body, const char* key, bool fallback) {
  const auto* v = member(body, key);
  if (!v) return fallback;
  if (!v->is_boolean()) malformed(std::string(key) + " must be a boolean", {{"field", key}});
  return v->get<bool>();
}

std::size_t req_index(const json& body, const char* key) {
  const auto* v = member(body, key);
  if (!v) malformed(std::string(key) + " is required", {{"field", key}});
  if (v->is_number_unsigned()) return v->get<std::size_t>();
  if (v->is_number_integer()) {
    throw Error(ErrorCode::index_out_of_range, std::string(key) + " must not be negative",
                {{"index", v->get<std::int64_t>()}});
  }
  malformed(std::string(key) + " must be an integer", {{"field", key}});
}

template <typename T, typename F>
std::optional<T> opt_object(const json& body, const char* key, F decode) {
  const auto* v = member(body, key);
  if (!v) return std::nullopt;
  try {
    return decode(*v);
  } catch (const Error& e) {
    malformed(std::string(key) + e.what(), {{"field", key}});
  }
}

// ---- responses ----

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(wire_dump(body), "application/json");
}

void send_error(httplib::Response& res, const Error& e) { send(res, http_status(e.code()), error_body(e)); }

json widgets_json(const std::vector<core::ControlWidget>& widgets) {
  json out = json::array();
  for (const auto& w : widgets) out.push_back(store::to_json(w));
  return out;
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::internal_error || e.code() == ErrorCode::storage_failure) {
        spdlog::error("{} {}: {}", req.method, req.path, e.what());
      }
      send_error(res, e);
    }
  };
}

std::string param(const httplib::Request& req, std::size_t i) { return req.matches[i].str(); }

void stream_job(httplib::Response& res, std::shared_ptr<StreamJob> job) {
  res.status = 200;
  res.set_header("Cache-Control", "no-cache");
  res.set_header("X-Accel-Buffering", "no");
  res.set_chunked_content_provider("text/event-stream", [job](std::size_t, httplib::DataSink& sink) {
    auto emit = [&](std::string_view event, const json& payload) {
      const auto frame = gateway::encode_sse(event, wire_dump(payload));
      sink.write(frame.data(), frame.size());
    };
    try {
      const auto doc = job->run([&](std::string_view chunk) { emit("delta", json(std::string(chunk))); });
      emit("done", {{"content", doc.content}, {"history_length", doc.history.size()}});
    } catch (const Error& e) {
      emit("error", {{"code", std::string(to_string(e.code()))},
                     {"message", e.what()},
                     {"partial", e.detail().is_object() ? e.detail().value("partial", "") : ""}});
    } catch (const std::exception& e) {
      spdlog::error("stream failed: {}", e.what());
      emit("error", {{"code", "internal_error"}, {"message", e.what()}, {"partial", ""}});
    }
    sink.done();
    return true;
  });
}

}  // namespace

struct ApiServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) { routes(); }

  void routes() {
    auto& svc = service;
    // Never "/:" in a pattern: httplib switches to its path-param matcher.
    const std::string ws = R"(/workspaces/([^:/]+))";
    const std::string widget = ws + R"(/widgets/([^:/]+))";

    server.Get("/healthz", guarded([](const auto&, auto& res) { send(res, 200, {{"status", "ok"}}); }));
    server.Get("/version", guarded([](const auto&, auto& res) {
      send(res, 200, {{"name", "pc"}, {"version", kVersion}, {"template_version", prompt::kTemplateVersion}});
    }));

    // Workspaces
    server.Post("/workspaces", guarded([&svc](const auto& req, auto& res) {
      send(res, 201, store::to_json(svc.create_workspace(req_string(body_of(req), "name"))));
    }));
    server.Get("/workspaces", guarded([&svc](const auto&, auto& res) {
      json out = json::array();
      for (const auto& s : svc.list_workspaces()) out.push_back(store::to_json(s));
      send(res, 200, out);
    }));
    server.Get(ws, guarded([&svc](const auto& req, auto& res) {
      send(res, 200, store::to_json(svc.get_workspace(param(req, 1))));
    }));
    server.Patch(ws, guarded([&svc](const auto& req, auto& res) {
      const auto body = body_of(req);
      const auto id = param(req, 1);
      const auto name = opt_string(body, "name");
      const auto viewport = opt_object<core::Viewport>(body, "viewport", store::viewport_from_json);
      svc.get_workspace(id);
      if (name) svc.rename_workspace(id, *name);
      if (viewport) svc.set_viewport(id, *viewport);
      send(res, 200, store::to_json(svc.get_workspace(id)));
    }));
    server.Delete(ws, guarded([&svc](const auto& req, auto& res) {
      svc.delete_workspace(param(req, 1));
      send(res, 200, {{"deleted", param(req, 1)}});
    }));
    server.Post(ws + ":duplicate", guarded([&svc](const auto& req, auto& res) {
      send(res, 201, store::to_json(svc.duplicate_workspace(param(req, 1), req_string(body_of(req), "name"))));
    }));

    // Widgets
    server.Post(ws + "/widgets", guarded([&svc](const auto& req, auto& res) {
      const auto body = body_of(req);
      const auto position = opt_object<core::Vec2>(body, "position", store::vec2_from_json);
      send(res, 201, store::to_json(svc.create_widget(param(req, 1), position.value_or(core::Vec2{}))));
    }));
    server.Post(ws + "/widgets:generate", guarded([&svc](const auto& req, auto& res) {
      const auto body = body_of(req);
      send(res, 200, widgets_json(svc.generate_widgets(param(req, 1), opt_string(body, "guiding_prompt"))));
    }));
    server.Patch(widget, guarded([&svc](const auto& req, auto& res) {
      const auto body = body_of(req);
      WidgetPatch patch;
      patch.title = opt_string(body, "title");
      patch.value = opt_string(body, "value");
      patch.size = opt_object<core::Size2>(body, "size", store::size_from_json);
      send(res, 200, store::to_json(svc.update_widget(param(req, 1), param(req, 2), patch)));
    }));
    server.Delete(widget, guarded([&svc](const auto& req, auto& res) {
      svc.delete_widget(param(req, 1), param(req, 2));
      send(res, 200, {{"deleted", param(req, 2)}});
    }));
    server.Post(widget + ":move", guarded([&svc](const auto& req, auto& res) {
      const auto body = body_of(req);
      const auto zone_name = req_string(body, "zone");
      core::Zone zone;
      try {
        zone = core::zone_from_string(zone_name);
      } catch (const Error&) {
        malformed("zone must be 'panel' or 'canvas'", {{"field", "zone"}});
      }
      const auto position = opt_object<core::Vec2>(body, "position", store::vec2_from_json);
      send(res, 200, store::to_json(svc.move_widget(param(req, 1), param(req, 2), zone, position)));
    }));
    server.Post(widget + ":save-input", guarded([&svc](const auto& req, auto& res) {
      body_of(req);
      send(res, 200, store::to_json(svc.save_input(param(req, 1), param(req, 2))));
    }));
    server.Post(widget + ":select", guarded([&svc](const auto& req, auto& res) {
      const auto index = req_index(body_of(req), "index");
      send(res, 200, store::to_json(svc.select_option(param(req, 1), param(req, 2), index)));
    }));
    server.Post(widget + "/options", guarded([&svc](const auto& req, auto& res) {
      const auto option = req_string(body_of(req), "option");
      send(res, 200, store::to_json(svc.add_option(param(req, 1), param(req, 2), option)));
    }));
    server.Post(widget + "/options:suggest", guarded([&svc](const auto& req, auto& res) {
      const auto guiding = opt_string(body_of(req), "guiding_prompt");
      send(res, 200, store::to_json(svc.suggest_options(param(req, 1), param(req, 2), guiding)));
    }));
    server.Post(widget + "/options:extract", guarded([&svc](const auto& req, auto& res) {
      body_of(req);
      send(res, 200, store::to_json(svc.extract_value(param(req, 1), param(req, 2))));
    }));

    // Document
    server.Get(ws + "/document", guarded([&svc](const auto& req, auto& res) {
      send(res, 200, store::to_json(svc.get_document(param(req, 1))));
    }));
    server.Put(ws + "/document", guarded([&svc](const auto& req, auto& res) {
      const auto body = body_of(req);
      auto content = req_string(body, "content");
      const bool checkpoint = opt_bool(body, "checkpoint", false);
      send(res, 200, store::to_json(svc.put_document(param(req, 1), std::move(content), checkpoint)));
    }));
    server.Get(ws + "/document/history", guarded([&svc](const auto& req, auto& res) {
      send(res, 200, store::to_json(svc.get_document(param(req, 1)))["history"]);
    }));
    server.Post(ws + "/document:revert", guarded([&svc](const auto& req, auto& res) {
      const auto index = req_index(body_of(req), "index");
      send(res, 200, store::to_json(svc.revert_document(param(req, 1), index)));
    }));
    server.Post(ws + "/document:rephrase", guarded([&svc](const auto& req, auto& res) {
      body_of(req);
      stream_job(res, std::shared_ptr<StreamJob>(svc.begin_rephrase(param(req, 1))));
    }));
    server.Post(ws + "/document:prompt", guarded([&svc](const auto& req, auto& res) {
      const auto prompt = opt_string(body_of(req), "prompt").value_or("");
      stream_job(res, std::shared_ptr<StreamJob>(svc.begin_prompt(param(req, 1), prompt)));
    }));

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      const auto code = res.status == 404 ? ErrorCode::not_found : ErrorCode::malformed_request;
      const auto status = res.status;
      send_error(res, Error(code, "no route for " + req.method + " " + req.path));
      if (code == ErrorCode::malformed_request) res.status = status;
    });
    server.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "unknown exception";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      spdlog::error("unhandled exception on {} {}: {}", req.method, req.path, what);
      send_error(res, Error(ErrorCode::internal_error, "internal error"));
    });
  }
};

ApiServer::ApiServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

ApiServer::~ApiServer() = default;

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::internal_error, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::internal_error, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void ApiServer::listen() { impl_->server.listen_after_bind(); }

void ApiServer::stop() { impl_->server.stop(); }

void ApiServer::wait_until_ready() { impl_->server.wait_until_ready(); }

}  // namespace pc::service
