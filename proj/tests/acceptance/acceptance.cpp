// Acceptance suite: one line per criterion, PASS or FAIL, with the measured
// runtime against its budget. Exit status is nonzero if any criterion fails.

#include "pc/core/widget.hpp"
#include "pc/core/workspace.hpp"
#include "pc/error.hpp"
#include "pc/gateway/fixture.hpp"
#include "pc/gateway/gateway.hpp"
#include "pc/gateway/replay.hpp"
#include "pc/gateway/scripted.hpp"
#include "pc/gateway/sse.hpp"
#include "pc/prompt/parse.hpp"
#include "pc/prompt/templates.hpp"
#include "pc/service/http_server.hpp"
#include "pc/service/service.hpp"
#include "pc/store/store.hpp"

#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "../support/temp_dir.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

using namespace pc;
using nlohmann::json;
using pc::testing::Gen;
using pc::testing::TempDir;
using prompt::FlowKind;

namespace {

struct Failure {
  std::string what;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure{what};
}

template <typename F>
std::optional<ErrorCode> error_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string trial(int i) { return " (trial " + std::to_string(i) + ")"; }

store::StoreOptions fast_store() { return {core::now, std::nullopt, false}; }

std::shared_ptr<gateway::Gateway> scripted(std::vector<gateway::ScriptedReply> replies, int max_retries = 2) {
  return std::make_shared<gateway::Gateway>(std::make_shared<gateway::ScriptedProvider>(std::move(replies)),
                                            max_retries);
}

// ---- widget generation bounds ----

void widget_generation_bounds() {
  Gen gen(1001);
  int accepted = 0, rejected = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = gen.integer(0, 6);
    bool in_range = n >= 1 && n <= 4;
    std::vector<core::WidgetSpec> specs;
    for (int k = 0; k < n; ++k) {
      core::WidgetSpec s{"label" + std::to_string(k), gen.word(), {}};
      const int m = gen.integer(0, 5);
      for (int o = 0; o < m; ++o) s.options.push_back("opt" + std::to_string(o));
      if (m > 3) in_range = false;
      specs.push_back(std::move(s));
    }
    const auto payload = prompt::widgets_payload(specs);
    std::vector<core::WidgetSpec> parsed;
    const auto err = error_of([&] { parsed = prompt::parse_widgets_response(payload); });
    if (in_range) {
      require(!err, "in-range payload rejected" + trial(i));
      require(parsed.size() >= 1 && parsed.size() <= 4, "accepted payload has 1-4 widgets" + trial(i));
      for (const auto& s : parsed) require(s.options.size() <= 3, "accepted widget has <= 3 options" + trial(i));
      ++accepted;
    } else {
      require(err == ErrorCode::schema_violation, "out-of-range payload not rejected as schema_violation" + trial(i));
      ++rejected;
    }

    // The same payload through the gateway: out-of-range answers are never
    // surfaced, they exhaust the retry budget instead.
    gateway::Gateway gw(std::make_shared<gateway::ScriptedProvider>(std::vector<gateway::ScriptedReply>{
                            {FlowKind::generate_widgets, gateway::StructuredResponse{payload}}}),
                        0);
    const auto request = prompt::build_generate_widgets("Some text.", {});
    const auto gw_err = error_of([&] {
      gw.complete_structured(request, [](const json& p) { prompt::check_structured_payload(FlowKind::generate_widgets, p); });
    });
    require(in_range ? !gw_err : gw_err == ErrorCode::schema_violation_exhausted, "gateway disagrees" + trial(i));
  }
  require(accepted > 20 && rejected > 20, "generator did not cover both sides");
}

// ---- dedup ----

void dedup_matches_oracle() {
  Gen gen(2002);
  for (int i = 0; i < 2000; ++i) {
    std::vector<core::ControlWidget> existing;
    const int e = gen.integer(0, 50);
    for (int k = 0; k < e; ++k) {
      core::ControlWidget w;
      w.id = "e" + std::to_string(k);
      w.title = gen.padded_word(0.1);
      existing.push_back(w);
    }
    std::vector<core::WidgetSpec> drafts;
    const int d = gen.integer(0, 50);
    for (int k = 0; k < d; ++k) {
      core::WidgetSpec s{gen.padded_word(0.0), gen.word(), {}};
      const int m = gen.integer(0, 6);
      for (int o = 0; o < m; ++o) s.options.push_back(gen.padded_word(0.0));
      drafts.push_back(std::move(s));
    }
    const auto got = core::dedup_new_widgets(drafts, existing);
    require(got == pc::testing::oracle_dedup(drafts, existing), "differs from set-membership oracle" + trial(i));
    require(core::dedup_new_widgets(got, existing) == got, "not idempotent" + trial(i));
  }
}

// ---- option ordering ----

// Independent model of the option list: novel candidates go on top in the
// order given, anything already present (after trimming) is ignored.
void oracle_insert(std::vector<std::string>& list, const std::vector<std::string>& candidates) {
  std::vector<std::string> novel;
  for (const auto& c : candidates) {
    const auto t = pc::testing::oracle_trim(c);
    bool seen = t.empty();
    for (const auto& x : list) seen = seen || pc::testing::oracle_trim(x) == t;
    for (const auto& x : novel) seen = seen || x == t;
    if (!seen) novel.push_back(t);
  }
  list.insert(list.begin(), novel.begin(), novel.end());
}

void option_ordering() {
  TempDir dir;
  store::WorkspaceStore st(dir.path(), fast_store());
  Gen gen(3003);
  for (int i = 0; i < 1000; ++i) {
    enum Op { suggest, extract, save };
    struct Step {
      Op op;
      std::vector<std::string> words;
    };
    std::vector<Step> steps;
    std::vector<gateway::ScriptedReply> replies;
    const int n = gen.integer(1, 8);
    for (int k = 0; k < n; ++k) {
      const auto op = static_cast<Op>(gen.integer(0, 2));
      if (op == suggest) {
        auto a = gen.padded_word(0.0);
        auto b = gen.padded_word(0.0);
        while (pc::testing::oracle_trim(a) == pc::testing::oracle_trim(b)) b = gen.padded_word(0.0);
        steps.push_back({op, {a, b}});
        replies.push_back({FlowKind::generate_options, gateway::StructuredResponse{json{{"options", {a, b}}}}});
      } else if (op == extract) {
        const auto v = gen.padded_word(0.0);
        steps.push_back({op, {v}});
        replies.push_back({FlowKind::extract_value, gateway::StructuredResponse{json{{"value", v}}}});
      } else {
        steps.push_back({op, {gen.padded_word(0.2)}});
      }
    }
    service::Service svc(st, scripted(std::move(replies)));
    const auto ws = svc.create_workspace("seq" + std::to_string(i)).id;
    svc.put_document(ws, "A story.", false);
    const auto wid = svc.create_widget(ws, {0, 0}).id;
    svc.update_widget(ws, wid, {"Title", std::nullopt, std::nullopt});

    std::vector<std::string> model;
    for (const auto& s : steps) {
      core::ControlWidget w;
      if (s.op == suggest) {
        w = svc.suggest_options(ws, wid, std::nullopt);
      } else if (s.op == extract) {
        w = svc.extract_value(ws, wid);
      } else {
        svc.update_widget(ws, wid, {std::nullopt, s.words[0], std::nullopt});
        const auto err = error_of([&] { w = svc.save_input(ws, wid); });
        if (err) {
          require(*err == ErrorCode::empty_value && pc::testing::oracle_trim(s.words[0]).empty(),
                  "unexpected save-input failure" + trial(i));
          w = svc.get_workspace(ws).widgets[0];
        }
      }
      const auto before = model.size();
      oracle_insert(model, s.words);
      require(w.options == model, "option list differs from oracle" + trial(i));
      if (model.size() > before) {
        require(pc::testing::oracle_trim(w.options[0]) == w.options[0], "inserted option is not trimmed" + trial(i));
      }
      std::set<std::string> unique;
      for (const auto& o : w.options) unique.insert(pc::testing::oracle_trim(o));
      require(unique.size() == w.options.size(), "duplicate options" + trial(i));
    }
  }
}

// ---- active pairs ----

void active_pairs_filtering() {
  Gen gen(4004);
  for (int i = 0; i < 10000; ++i) {
    const auto ws = gen.workspace("ws", "W");
    require(core::active_pairs(ws) == pc::testing::oracle_active_pairs(ws), "differs from oracle" + trial(i));
  }
}

// ---- streaming atomicity ----

void streaming_atomicity() {
  TempDir dir;
  store::WorkspaceStore st(dir.path(), fast_store());
  Gen gen(5005);
  int successes = 0, failures = 0;
  for (int i = 0; i < 300; ++i) {
    const bool rephrase = gen.chance(0.5);
    const auto n = static_cast<std::size_t>(i < 2 ? i * 500 : gen.integer(0, 500));
    std::vector<std::string> chunks;
    std::string joined;
    for (std::size_t k = 0; k < n; ++k) {
      chunks.push_back(gen.text(8));
      joined += chunks.back();
    }
    std::optional<std::size_t> fault;
    if (gen.chance(0.35)) fault = static_cast<std::size_t>(gen.integer(0, static_cast<int>(n)));
    service::Service svc(st, scripted({{rephrase ? FlowKind::apply_widgets : FlowKind::apply_prompt,
                                        gateway::StreamResponse{chunks, fault}}}));
    const auto ws = svc.create_workspace("stream" + std::to_string(i)).id;
    svc.put_document(ws, "Before " + std::to_string(i), gen.chance(0.5));
    const auto w = svc.create_widget(ws, {0, 0});
    svc.update_widget(ws, w.id, {"Tone", "dark", std::nullopt});
    const auto before = svc.get_document(ws);

    auto job = rephrase ? svc.begin_rephrase(ws) : svc.begin_prompt(ws, "Make it longer");
    std::string streamed;
    const auto err = error_of([&] { job->run([&](std::string_view c) { streamed += c; }); });
    job.reset();
    const auto after = svc.get_document(ws);
    if (fault) {
      require(err.has_value(), "fault did not fail the flow" + trial(i));
      require(after == before, "document changed after a failed stream" + trial(i));
      ++failures;
    } else {
      require(!err, "clean stream failed" + trial(i));
      require(streamed == joined, "deltas differ from chunks" + trial(i));
      require(after.content == joined, "document is not the chunk concatenation" + trial(i));
      require(after.history.size() == before.history.size() + 1, "history did not grow by one" + trial(i));
      require(after.history.back().text == before.content, "revision does not hold the prior text" + trial(i));
      ++successes;
    }
  }
  require(successes > 50 && failures > 50, "generator did not cover both outcomes");
}

// ---- scenario via the pc binary ----

void scenario_reproduction() {
  for (const char* v : {"PC_PROVIDER_MODE", "PC_FIXTURE_PATH", "PC_DATA_DIR"}) ::unsetenv(v);
  // Any attempt to reach a model would fail fast against a closed port.
  ::setenv("PC_LLM_BASE_URL", "http://127.0.0.1:9/v1", 1);
  const std::string cmd = std::string("\"") + PC_BINARY + "\" scenario run \"" + PC_SCENARIO_DIR +
                          "/three_little_pigs.scenario\" 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  require(pipe != nullptr, "cannot start pc");
  std::string output;
  char buf[4096];
  while (const auto n = std::fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
  const int status = ::pclose(pipe);
  require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "pc exited with failure:\n" + output);
  for (const char* step : {"prompt \"Write a short story", "generate-widgets", "move $tone canvas",
                           "create-widget $names", "Give me 3 names that rhyme", "select $names",
                           "rephrase"}) {
    require(output.find(step) != std::string::npos, std::string("report lacks step ") + step);
  }
  require(output.find("FAIL") == std::string::npos, "a step failed:\n" + output);
  require(output.find("PASS") != std::string::npos, "no PASS summary:\n" + output);
}

// ---- persistence ----

void persistence_round_trip() {
  TempDir dir;
  Gen gen(7007);
  std::vector<core::Workspace> saved;
  {
    store::WorkspaceStore st(dir.path());
    for (int i = 0; i < 500; ++i) {
      auto ws = gen.workspace(st.new_id(), "ws" + std::to_string(i));
      st.save(ws);
      saved.push_back(std::move(ws));
    }
  }
  store::WorkspaceStore reopened(dir.path());
  require(reopened.list().size() == saved.size(), "reopened store lists a different number of workspaces");
  for (std::size_t i = 0; i < saved.size(); ++i) {
    require(reopened.load(saved[i].id) == saved[i], "round trip changed a workspace" + trial(static_cast<int>(i)));
  }

  // Writer killed after the temporary file is complete but before rename.
  for (int round = 0; round < 40; ++round) {
    const auto& victim = saved[static_cast<std::size_t>(gen.integer(0, static_cast<int>(saved.size()) - 1))];
    const pid_t child = ::fork();
    require(child >= 0, "fork failed");
    if (child == 0) {
      auto storage = std::make_unique<store::FileStorage>(dir.path() / "workspaces");
      storage->set_fault_hook([](const auto&, const auto&) { ::raise(SIGKILL); });
      store::WorkspaceStore st(std::move(storage), std::make_unique<store::InteractionLog>(dir.path() / "log.jsonl"));
      auto changed = victim;
      changed.document.content = std::string(100'000, 'x');
      st.save(changed);
      ::_exit(0);
    }
    int status = 0;
    ::waitpid(child, &status, 0);
    require(WIFSIGNALED(status), "writer was not killed at the fault point");
    store::WorkspaceStore st(dir.path());
    require(st.load(victim.id) == victim, "torn or changed read after crash before rename" + trial(round));
  }

  // Writer killed at random moments while alternating two large versions.
  auto a = saved.front();
  a.document.content = std::string(300'000, 'a');
  auto b = a;
  b.document.content = std::string(200'000, 'b');
  store::WorkspaceStore(dir.path()).save(a);
  for (int round = 0; round < 15; ++round) {
    const pid_t child = ::fork();
    require(child >= 0, "fork failed");
    if (child == 0) {
      store::WorkspaceStore st(dir.path());
      for (int i = 0;; ++i) st.save(i % 2 ? a : b);
    }
    ::usleep(static_cast<useconds_t>(gen.integer(1'000, 20'000)));
    ::kill(child, SIGKILL);
    ::waitpid(child, nullptr, 0);
    const auto loaded = store::WorkspaceStore(dir.path()).load(a.id);
    require(loaded == a || loaded == b, "torn read after random kill" + trial(round));
  }
}

// ---- retry policy ----

json invalid_payload(FlowKind flow) {
  switch (flow) {
    case FlowKind::generate_widgets: return json{{"widgets", json::array()}};
    case FlowKind::generate_options: return json{{"options", {"only one"}}};
    default: return json{{"value", "   "}};
  }
}

json valid_payload(FlowKind flow) {
  switch (flow) {
    case FlowKind::generate_widgets: return prompt::widgets_payload({{"Tone", "dark", {"light"}}});
    case FlowKind::generate_options: return json{{"options", {"a", "b"}}};
    default: return json{{"value", "v"}};
  }
}

void retry_policy() {
  const std::vector<FlowKind> flows{FlowKind::generate_widgets, FlowKind::generate_options, FlowKind::extract_value};
  // Gateway level, against sequenced fixture entries.
  for (int max_retries = 0; max_retries <= 3; ++max_retries) {
    for (int n = 0; n <= 5; ++n) {
      for (const auto flow : flows) {
        const auto request = flow == FlowKind::generate_widgets ? prompt::build_generate_widgets("Text.", {})
                             : flow == FlowKind::generate_options
                                 ? prompt::build_generate_options("Title", {}, "Text.")
                                 : prompt::build_extract_value("Title", "Text.");
        std::vector<json> payloads(static_cast<std::size_t>(n), invalid_payload(flow));
        payloads.push_back(valid_payload(flow));
        const auto entry = gateway::sequence_entry(request, payloads);
        auto replay = std::make_shared<gateway::ReplayProvider>(gateway::Fixture{{entry}});
        gateway::Gateway gw(replay, max_retries);
        const auto validate = [flow](const json& p) { prompt::check_structured_payload(flow, p); };
        const auto label = " (max_retries " + std::to_string(max_retries) + ", n " + std::to_string(n) + ", " +
                           std::string(prompt::to_string(flow)) + ")";
        if (n <= max_retries) {
          const auto result = gw.complete_structured(request, validate);
          require(result.attempts == n + 1, "wrong attempt count" + label);
          require(result.payload == payloads.back(), "wrong payload accepted" + label);
        } else {
          try {
            gw.complete_structured(request, validate);
            require(false, "succeeded past the retry budget" + label);
          } catch (const Error& e) {
            require(e.code() == ErrorCode::schema_violation_exhausted, "wrong error code" + label);
            require(e.detail().at("attempts") == max_retries + 1, "wrong attempts in detail" + label);
          }
        }
        require(replay->calls(entry.request_digest) == static_cast<std::size_t>(std::min(n, max_retries) + 1),
                "provider called a different number of times" + label);
      }
    }
  }

  // Service level: the interaction log records the attempts.
  TempDir dir;
  store::WorkspaceStore st(dir.path(), fast_store());
  int counter = 0;
  for (int n = 0; n <= 4; ++n) {
    for (const auto flow : flows) {
      std::vector<json> payloads(static_cast<std::size_t>(n), invalid_payload(flow));
      payloads.push_back(valid_payload(flow));
      service::Service svc(st, scripted({{flow, gateway::SequenceResponse{payloads}}}, 2));
      const auto ws = svc.create_workspace("retry" + std::to_string(counter++)).id;
      svc.put_document(ws, "Text.", false);
      const auto wid = svc.create_widget(ws, {0, 0}).id;
      svc.update_widget(ws, wid, {"Title", std::nullopt, std::nullopt});
      const auto err = error_of([&] {
        if (flow == FlowKind::generate_widgets) svc.generate_widgets(ws, std::nullopt);
        else if (flow == FlowKind::generate_options) svc.suggest_options(ws, wid, std::nullopt);
        else svc.extract_value(ws, wid);
      });
      const auto log = st.log().read_for(ws);
      std::optional<store::LogEntry> last;
      for (const auto& e : log) {
        if (e.event == store::LogEvent::flow_completed || e.event == store::LogEvent::flow_failed) last = e;
      }
      const auto label = " (n " + std::to_string(n) + ", " + std::string(prompt::to_string(flow)) + ")";
      require(last.has_value(), "no flow outcome logged" + label);
      if (n <= 2) {
        require(!err && last->event == store::LogEvent::flow_completed, "flow did not complete" + label);
        require(last->detail.at("attempts") == n + 1, "logged attempts differ" + label);
      } else {
        require(err == ErrorCode::schema_violation_exhausted && last->event == store::LogEvent::flow_failed,
                "flow did not fail" + label);
        require(last->detail.at("attempts") == 3, "logged attempts differ" + label);
      }
    }
  }
}

// ---- API fuzzing ----

std::string random_bytes(Gen& gen, int max_len) {
  std::string s;
  const int n = gen.integer(0, max_len);
  for (int i = 0; i < n; ++i) s += static_cast<char>(gen.integer(0, 255));
  return s;
}

json random_value(Gen& gen, int depth = 0) {
  switch (gen.integer(0, 9)) {
    case 0: return nullptr;
    case 1: return gen.chance(0.5);
    case 2: return gen.integer(-5, 5);
    case 3: return gen.real(-1e308, 1e308);
    case 4: return -1;
    case 5: return std::string(static_cast<std::size_t>(gen.integer(0, 3)), ' ');
    case 6: return gen.text(30);
    case 7: return depth < 2 ? json::array({random_value(gen, depth + 1), random_value(gen, depth + 1)}) : json(1);
    case 8:
      return depth < 2 ? json{{"x", random_value(gen, depth + 1)}, {"y", random_value(gen, depth + 1)},
                              {"zoom", random_value(gen, depth + 1)}}
                       : json(0);
    default: return 18446744073709551615ULL;
  }
}

std::string random_body(Gen& gen) {
  static const std::vector<std::string> keys{"name",  "viewport", "position", "guiding_prompt", "title", "value",
                                             "size",  "zone",     "index",    "option",         "content",
                                             "checkpoint", "prompt", "pan",   "width",          "height"};
  switch (gen.integer(0, 7)) {
    case 0: return "";
    case 1: return random_bytes(gen, 64);
    case 2: return gen.pick(std::vector<std::string>{"[]", "null", "42", "\"s\"", "true", "{", "{\"a\":", "[{}]"});
    case 3: return "{\"name\": \"\xff\xfe\xfd\"}";
    case 4: return "{\"content\": \"\\ud800\"}";
    default: {
      json body = json::object();
      const int n = gen.integer(0, 4);
      for (int i = 0; i < n; ++i) body[gen.pick(keys)] = random_value(gen);
      if (gen.chance(0.3)) body["zone"] = gen.pick(std::vector<std::string>{"canvas", "panel", "attic"});
      return body.dump(-1, ' ', false, json::error_handler_t::replace);
    }
  }
}

void api_fuzzing() {
  spdlog::set_level(spdlog::level::off);
  TempDir dir;
  store::WorkspaceStore st(dir.path(), fast_store());
  service::Service svc(st, std::make_shared<gateway::Gateway>(
                               std::make_shared<gateway::ReplayProvider>(gateway::Fixture{}), 2));
  const auto ws = svc.create_workspace("Fuzz").id;
  svc.put_document(ws, "Some text.", false);
  const auto wid = svc.create_widget(ws, {1, 1}).id;
  svc.update_widget(ws, wid, {"Tone", "dark", std::nullopt});
  svc.save_input(ws, wid);

  service::ApiServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  std::thread t([&] { server.listen(); });
  server.wait_until_ready();
  struct Stop {
    service::ApiServer& s;
    std::thread& t;
    ~Stop() {
      s.stop();
      t.join();
    }
  } stop{server, t};

  std::set<std::string> documented;
  for (const auto c : all_error_codes()) documented.insert(std::string(to_string(c)));

  const std::vector<std::pair<std::string, std::string>> routes{
      {"POST", "/workspaces"},
      {"GET", "/workspaces"},
      {"GET", "/workspaces/{ws}"},
      {"PATCH", "/workspaces/{ws}"},
      {"DELETE", "/workspaces/{ws}"},
      {"POST", "/workspaces/{ws}:duplicate"},
      {"POST", "/workspaces/{ws}/widgets"},
      {"POST", "/workspaces/{ws}/widgets:generate"},
      {"PATCH", "/workspaces/{ws}/widgets/{w}"},
      {"DELETE", "/workspaces/{ws}/widgets/{w}"},
      {"POST", "/workspaces/{ws}/widgets/{w}:move"},
      {"POST", "/workspaces/{ws}/widgets/{w}:save-input"},
      {"POST", "/workspaces/{ws}/widgets/{w}:select"},
      {"POST", "/workspaces/{ws}/widgets/{w}/options"},
      {"POST", "/workspaces/{ws}/widgets/{w}/options:suggest"},
      {"POST", "/workspaces/{ws}/widgets/{w}/options:extract"},
      {"GET", "/workspaces/{ws}/document"},
      {"PUT", "/workspaces/{ws}/document"},
      {"GET", "/workspaces/{ws}/document/history"},
      {"POST", "/workspaces/{ws}/document:revert"},
      {"POST", "/workspaces/{ws}/document:rephrase"},
      {"POST", "/workspaces/{ws}/document:prompt"},
      {"PUT", "/healthz"},
      {"GET", "/nowhere"},
  };
  const std::vector<std::string> methods{"GET", "POST", "PUT", "PATCH", "DELETE"};

  Gen gen(9009);
  httplib::Client cli("127.0.0.1", port);
  std::map<std::string, int> seen;
  for (int i = 0; i < 1000; ++i) {
    auto [method, path] = gen.pick(routes);
    if (gen.chance(0.1)) method = gen.pick(methods);
    const auto id_for = [&](const std::string& valid) {
      switch (gen.integer(0, 5)) {
        case 0: return std::string("00000000-0000-4000-8000-000000000000");
        case 1: return std::string("%2e%2e%2fetc");
        case 2: return std::string(300, 'z');
        default: return valid;
      }
    };
    // Deleting the fixture workspace would starve later cases.
    if (method == "DELETE" && path == "/workspaces/{ws}") path = "/workspaces/{ws}/widgets/{w}";
    if (const auto p = path.find("{ws}"); p != std::string::npos) path.replace(p, 4, id_for(ws));
    if (const auto p = path.find("{w}"); p != std::string::npos) path.replace(p, 3, id_for(wid));
    if (method == "DELETE" && path.find(wid) != std::string::npos) path += "-other";
    const auto body = random_body(gen);

    httplib::Result r;
    if (method == "GET") r = cli.Get(path);
    else if (method == "POST") r = cli.Post(path, body, "application/json");
    else if (method == "PUT") r = cli.Put(path, body, "application/json");
    else if (method == "PATCH") r = cli.Patch(path, body, "application/json");
    else r = cli.Delete(path, body, "application/json");
    const auto label = " (case " + std::to_string(i) + ": " + method + " " + path + " " + body.substr(0, 80) + ")";
    require(static_cast<bool>(r), "no response" + label);

    const auto type = r->get_header_value("Content-Type");
    ++seen[std::to_string(r->status)];
    if (type.rfind("text/event-stream", 0) == 0) {
      gateway::SseDecoder decoder;
      for (const auto& ev : decoder.feed(r->body)) {
        if (ev.event != "error") continue;
        const auto code = json::parse(ev.data).at("code").get<std::string>();
        require(documented.count(code) && code != "internal_error", "stream error code " + code + label);
      }
      continue;
    }
    json parsed;
    try {
      parsed = json::parse(r->body);
    } catch (const json::exception&) {
      require(false, "body is not JSON" + label);
    }
    if (r->status < 400) continue;
    require(parsed.is_object() && parsed.contains("code") && parsed.contains("message") && parsed.contains("detail"),
            "error body shape" + label);
    const auto code = parsed["code"].get<std::string>();
    ++seen[code];
    require(documented.count(code) > 0, "undocumented code " + code + label);
    require(code != "internal_error", "internal_error" + label);
    require(r->status == http_status(error_code_from_string(code)), "status does not match code " + code + label);
  }
  // The corpus must reach past request parsing into the handlers.
  for (const char* k : {"200", "201", "400", "404", "502", "malformed_request", "missing_fixture", "unknown_workspace", "unknown_widget"}) {
    require(seen[k] > 0, std::string("fuzz corpus never produced ") + k);
  }
  if (std::getenv("PC_FUZZ_STATS")) {
    for (const auto& [k, v] : seen) std::cerr << k << ' ' << v << '\n';
  }
  const auto health = cli.Get("/healthz");
  require(health && health->status == 200, "server unhealthy after fuzzing");
}

struct Criterion {
  std::string name;
  double budget_s;
  std::function<void()> run;
};

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> criteria{
      {"widget-generation-bounds", 5, widget_generation_bounds},
      {"dedup-oracle", 5, dedup_matches_oracle},
      {"option-ordering", 10, option_ordering},
      {"active-pairs-filtering", 5, active_pairs_filtering},
      {"streaming-atomicity", 10, streaming_atomicity},
      {"scenario-reproduction", 10, scenario_reproduction},
      {"persistence-round-trip", 30, persistence_round_trip},
      {"retry-policy", 5, retry_policy},
      {"api-error-taxonomy", 30, api_fuzzing},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string problem;
    try {
      c.run();
    } catch (const Failure& f) {
      problem = f.what;
    } catch (const std::exception& e) {
      problem = std::string("unexpected exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (problem.empty() && secs >= c.budget_s) problem = "over budget";
    if (problem.empty()) {
      std::cout << fmt::format("PASS {} ({:.2f} s, budget {} s)\n", c.name, secs, c.budget_s);
    } else {
      ++failed;
      std::cout << fmt::format("FAIL {} ({:.2f} s, budget {} s): {}\n", c.name, secs, c.budget_s, problem);
    }
    std::cout << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
