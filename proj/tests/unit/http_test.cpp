#include "pc/error.hpp"
#include "pc/gateway/scripted.hpp"
#include "pc/gateway/sse.hpp"
#include "pc/prompt/parse.hpp"
#include "pc/service/http_server.hpp"

#include "../support/temp_dir.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <memory>
#include <thread>

using namespace pc;
using gateway::ScriptedReply;
using gateway::StreamResponse;
using gateway::StructuredResponse;
using nlohmann::json;
using prompt::FlowKind;

namespace {

struct Reply {
  int status = 0;
  json body;
  std::string content_type;
};

// Each read advances one millisecond, so listing order never depends on
// how fast the test runs.
core::Clock ticking_clock() {
  auto ticks = std::make_shared<std::atomic<std::int64_t>>(1'700'000'000'000);
  return [ticks] { return core::Timestamp(std::chrono::milliseconds(ticks->fetch_add(1))); };
}

class Harness {
public:
  explicit Harness(std::vector<ScriptedReply> replies = {})
      : store_(dir_.path(), {ticking_clock(), std::nullopt, false}),
        service_(store_, std::make_shared<gateway::Gateway>(
                             std::make_shared<gateway::ScriptedProvider>(std::move(replies)), 2)),
        server_(service_) {
    port_ = server_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.listen(); });
    server_.wait_until_ready();
  }
  ~Harness() {
    server_.stop();
    thread_.join();
  }

  Reply call(const std::string& method, const std::string& path, const std::string& body = "") {
    httplib::Client cli("127.0.0.1", port_);
    httplib::Result r;
    if (method == "GET") r = cli.Get(path);
    else if (method == "POST") r = cli.Post(path, body, "application/json");
    else if (method == "PUT") r = cli.Put(path, body, "application/json");
    else if (method == "PATCH") r = cli.Patch(path, body, "application/json");
    else if (method == "DELETE") r = cli.Delete(path, body, "application/json");
    if (!r) throw std::runtime_error("request failed: " + httplib::to_string(r.error()));
    Reply out{r->status, json(), r->get_header_value("Content-Type")};
    if (out.content_type.rfind("application/json", 0) == 0) out.body = json::parse(r->body);
    else out.body = r->body;
    return out;
  }
  Reply call(const std::string& method, const std::string& path, const json& body) {
    return call(method, path, body.dump());
  }

  std::vector<gateway::SseEvent> stream(const std::string& path, const json& body = json::object()) {
    const auto r = call("POST", path, body);
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.content_type.rfind("text/event-stream", 0), 0u) << r.content_type;
    gateway::SseDecoder decoder;
    return decoder.feed(r.body.get<std::string>());
  }

  std::string new_workspace(const std::string& name, const std::string& text = "") {
    const auto r = call("POST", "/workspaces", json{{"name", name}});
    EXPECT_EQ(r.status, 201);
    const auto id = r.body.at("id").get<std::string>();
    if (!text.empty()) call("PUT", "/workspaces/" + id + "/document", json{{"content", text}});
    return id;
  }

private:
  pc::testing::TempDir dir_;
  store::WorkspaceStore store_;
  service::Service service_;
  service::ApiServer server_;
  std::thread thread_;
  int port_ = 0;
};

void expect_error(const Reply& r, int status, const std::string& code) {
  EXPECT_EQ(r.status, status) << r.body.dump();
  ASSERT_TRUE(r.body.is_object()) << r.body.dump();
  EXPECT_EQ(r.body.value("code", ""), code) << r.body.dump();
  EXPECT_TRUE(r.body.at("message").is_string());
  EXPECT_TRUE(r.body.contains("detail"));
}

}  // namespace

TEST(Http, HealthAndVersion) {
  Harness h;
  EXPECT_EQ(h.call("GET", "/healthz").body, (json{{"status", "ok"}}));
  const auto v = h.call("GET", "/version");
  EXPECT_EQ(v.status, 200);
  EXPECT_EQ(v.body.at("version"), std::string(service::kVersion));
}

TEST(Http, WorkspaceLifecycle) {
  Harness h;
  const auto a = h.new_workspace("Alpha");
  EXPECT_TRUE(core::is_uuid_v4(a));
  expect_error(h.call("POST", "/workspaces", json{{"name", " Alpha "}}), 409, "name_conflict");
  expect_error(h.call("POST", "/workspaces", json{{"name", "  "}}), 400, "empty_name");

  auto got = h.call("GET", "/workspaces/" + a);
  EXPECT_EQ(got.body.at("name"), "Alpha");
  EXPECT_EQ(got.body.at("document").at("content"), "");

  const auto renamed = h.call("PATCH", "/workspaces/" + a,
                              json{{"name", "Beta"}, {"viewport", {{"pan", {{"x", 3}, {"y", 4}}}, {"zoom", 2}}}});
  EXPECT_EQ(renamed.status, 200);
  EXPECT_EQ(renamed.body.at("name"), "Beta");
  EXPECT_EQ(renamed.body.at("viewport").at("zoom"), 2.0);

  h.call("POST", "/workspaces/" + a + "/widgets", json{{"position", {{"x", 1}, {"y", 2}}}});
  const auto dup = h.call("POST", "/workspaces/" + a + ":duplicate", json{{"name", "Gamma"}});
  EXPECT_EQ(dup.status, 201);
  EXPECT_NE(dup.body.at("id"), a);
  ASSERT_EQ(dup.body.at("widgets").size(), 1u);

  const auto list = h.call("GET", "/workspaces");
  ASSERT_EQ(list.body.size(), 2u);
  EXPECT_EQ(list.body[0].at("name"), "Gamma");
  EXPECT_EQ(list.body[1].at("widget_count"), 1);

  const auto del = h.call("DELETE", "/workspaces/" + a);
  EXPECT_EQ(del.body, (json{{"deleted", a}}));
  expect_error(h.call("GET", "/workspaces/" + a), 404, "unknown_workspace");
  expect_error(h.call("GET", "/workspaces/../../etc/passwd"), 404, "not_found");
}

TEST(Http, WidgetEditing) {
  Harness h;
  const auto ws = h.new_workspace("W");
  const auto base = "/workspaces/" + ws + "/widgets";
  const auto w = h.call("POST", base).body;
  EXPECT_EQ(w.at("zone"), "canvas");
  const auto wid = w.at("id").get<std::string>();

  auto patched = h.call("PATCH", base + "/" + wid, json{{"title", "Tone"}, {"value", "dark"}}).body;
  EXPECT_EQ(patched.at("title"), "Tone");
  patched = h.call("POST", base + "/" + wid + ":save-input").body;
  EXPECT_EQ(patched.at("options"), (json{"dark"}));
  h.call("POST", base + "/" + wid + "/options", json{{"option", "light"}});
  patched = h.call("POST", base + "/" + wid + ":select", json{{"index", 1}}).body;
  EXPECT_EQ(patched.at("value"), "dark");
  expect_error(h.call("POST", base + "/" + wid + ":select", json{{"index", 7}}), 400, "index_out_of_range");
  expect_error(h.call("POST", base + "/" + wid + ":select", json{{"index", -1}}), 400, "index_out_of_range");
  expect_error(h.call("POST", base + "/" + wid + "/options", json{{"option", " "}}), 400, "empty_option");

  patched = h.call("POST", base + "/" + wid + ":move", json{{"zone", "panel"}}).body;
  EXPECT_EQ(patched.at("zone"), "panel");
  EXPECT_FALSE(patched.contains("position") && !patched.at("position").is_null());
  expect_error(h.call("POST", base + "/" + wid + ":move", json{{"zone", "attic"}}), 400, "malformed_request");

  expect_error(h.call("PATCH", base + "/nope", json{{"title", "x"}}), 404, "unknown_widget");
  EXPECT_EQ(h.call("DELETE", base + "/" + wid).status, 200);
  expect_error(h.call("DELETE", base + "/" + wid), 404, "unknown_widget");
}

TEST(Http, MalformedBodies) {
  Harness h;
  const auto ws = h.new_workspace("W");
  expect_error(h.call("POST", "/workspaces", std::string("{not json")), 400, "malformed_request");
  expect_error(h.call("POST", "/workspaces", std::string("[1,2]")), 400, "malformed_request");
  expect_error(h.call("POST", "/workspaces", json{{"name", 5}}), 400, "malformed_request");
  expect_error(h.call("POST", "/workspaces", std::string("{\"name\":\"\xff\xfe\"}")), 400, "malformed_request");
  expect_error(h.call("PUT", "/workspaces/" + ws + "/document", json::object()), 400, "malformed_request");
  expect_error(h.call("PATCH", "/workspaces/" + ws, json{{"viewport", {{"zoom", 0}}}}), 400, "malformed_request");
  expect_error(h.call("GET", "/nowhere"), 404, "not_found");
  const auto wrong_method = h.call("PUT", "/healthz", json::object());
  EXPECT_GE(wrong_method.status, 400);
  EXPECT_TRUE(wrong_method.body.contains("code"));
}

TEST(Http, StructuredFlows) {
  Harness h({{FlowKind::generate_widgets,
              StructuredResponse{prompt::widgets_payload({{"Tone", "dark", {"light"}}, {"Tone", "x", {}}})}},
             {FlowKind::generate_options, StructuredResponse{json{{"options", {"grim", "bleak"}}}}},
             {FlowKind::extract_value, StructuredResponse{json{{"value", "sombre"}}}}});
  const auto ws = h.new_workspace("W", "A dark tale.");
  const auto created = h.call("POST", "/workspaces/" + ws + "/widgets:generate", json::object());
  ASSERT_EQ(created.status, 200);
  ASSERT_TRUE(created.body.is_array());
  ASSERT_EQ(created.body.size(), 1u);
  EXPECT_EQ(created.body[0].at("zone"), "panel");
  EXPECT_EQ(created.body[0].at("fresh"), true);
  const auto wid = created.body[0].at("id").get<std::string>();
  const auto base = "/workspaces/" + ws + "/widgets/" + wid;
  EXPECT_EQ(h.call("POST", base + "/options:suggest").body.at("options"), (json{"grim", "bleak", "light"}));
  EXPECT_EQ(h.call("POST", base + "/options:extract").body.at("options").at(0), "sombre");
  // Script exhausted: the provider failure surfaces with its own code.
  expect_error(h.call("POST", base + "/options:extract"), 502, "missing_fixture");
}

TEST(Http, PromptStreamMatchesDocument) {
  Harness h({{FlowKind::apply_prompt, StreamResponse{{"Line one\n", "line \"two\"", ""}, std::nullopt}}});
  const auto ws = h.new_workspace("W");
  const auto events = h.stream("/workspaces/" + ws + "/document:prompt", json{{"prompt", "Write"}});
  ASSERT_GE(events.size(), 2u);
  std::string joined;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    EXPECT_EQ(events[i].event, "delta");
    joined += json::parse(events[i].data).get<std::string>();
  }
  EXPECT_EQ(events.back().event, "done");
  const auto done = json::parse(events.back().data);
  EXPECT_EQ(done.at("content"), joined);
  EXPECT_EQ(done.at("history_length"), 1);
  const auto doc = h.call("GET", "/workspaces/" + ws + "/document").body;
  EXPECT_EQ(doc.at("content"), done.at("content"));
  EXPECT_EQ(h.call("GET", "/workspaces/" + ws + "/document/history").body.size(), 1u);
}

TEST(Http, StreamFaultReportsPartial) {
  Harness h({{FlowKind::apply_widgets, StreamResponse{{"ab", "cd", "ef"}, 2}}});
  const auto ws = h.new_workspace("W", "Original.");
  const auto base = "/workspaces/" + ws;
  expect_error(h.call("POST", base + "/document:rephrase"), 409, "no_active_widgets");
  const auto wid = h.call("POST", base + "/widgets").body.at("id").get<std::string>();
  h.call("PATCH", base + "/widgets/" + wid, json{{"title", "Tone"}, {"value", "dark"}});

  const auto events = h.stream(base + "/document:rephrase");
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[0].event, "delta");
  EXPECT_EQ(events[1].event, "delta");
  EXPECT_EQ(events[2].event, "error");
  const auto err = json::parse(events[2].data);
  EXPECT_EQ(err.at("code"), "provider_unavailable");
  EXPECT_EQ(err.at("partial"), "abcd");
  const auto doc = h.call("GET", base + "/document").body;
  EXPECT_EQ(doc.at("content"), "Original.");
  EXPECT_TRUE(doc.at("history").empty());
}

TEST(Http, DocumentEditing) {
  Harness h;
  const auto ws = h.new_workspace("W", "one");
  const auto base = "/workspaces/" + ws + "/document";
  auto doc = h.call("PUT", base, json{{"content", "two"}, {"checkpoint", true}}).body;
  ASSERT_EQ(doc.at("history").size(), 1u);
  EXPECT_EQ(doc.at("history")[0].at("cause"), "user_edit");
  doc = h.call("POST", base + ":revert", json{{"index", 0}}).body;
  EXPECT_EQ(doc.at("content"), "one");
  expect_error(h.call("POST", base + ":revert", json{{"index", 99}}), 400, "index_out_of_range");
  expect_error(h.call("POST", base + ":prompt", json{{"prompt", ""}}), 400, "empty_prompt");
}
