#include "pc/cli/app.hpp"

#include "pc/cli/backend.hpp"
#include "pc/cli/scenario.hpp"
#include "pc/error.hpp"
#include "pc/gateway/config.hpp"
#include "pc/gateway/fixture.hpp"
#include "pc/gateway/live.hpp"
#include "pc/gateway/recording.hpp"
#include "pc/gateway/replay.hpp"
#include "pc/gateway/scripted.hpp"
#include "pc/service/http_server.hpp"
#include "pc/store/serialization.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

namespace pc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Builds the real provider on first use, so commands that never reach the
// model do not need credentials or a fixture.
class LazyProvider final : public gateway::Provider {
public:
  explicit LazyProvider(std::function<std::shared_ptr<gateway::Provider>()> make) : make_(std::move(make)) {}

  json complete(const prompt::FlowRequest& request) override { return get().complete(request); }
  void stream(const prompt::FlowRequest& request, const gateway::ChunkSink& on_chunk) override {
    get().stream(request, on_chunk);
  }

private:
  gateway::Provider& get() {
    std::lock_guard lock(mutex_);
    if (!inner_) inner_ = make_();
    return *inner_;
  }

  std::function<std::shared_ptr<gateway::Provider>()> make_;
  std::mutex mutex_;
  std::shared_ptr<gateway::Provider> inner_;
};

class TempDataDir {
public:
  TempDataDir() {
    std::string pattern = (fs::temp_directory_path() / "pc-scenario-XXXXXX").string();
    if (!::mkdtemp(pattern.data())) throw Error(ErrorCode::storage_failure, "cannot create a temporary data dir");
    path_ = pattern;
  }
  ~TempDataDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

private:
  fs::path path_;
};

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

void route_logs_to_stderr(bool verbose) {
  static std::once_flag once;
  std::call_once(once, [] { spdlog::set_default_logger(spdlog::stderr_color_mt("pc")); });
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
}

struct Options {
  std::string data_dir;
  std::string provider_mode;
  std::string fixture;
  std::string server;
  bool json_output = false;
  bool verbose = false;

  // workspace
  std::string name;
  std::string id;

  // flow
  std::string workspace;
  std::string widget;
  std::string guiding_prompt;
  std::string prompt;

  // scenario / fixture
  std::string script;
  std::string replies;
  std::string bind_addr;
};

/// Everything a command needs: settings, and a backend that is either an
/// in-process service over a local store or an HTTP client.
class Context {
public:
  Context(const Options& o, const CLI::App& app, std::optional<fs::path> scenario_fixture = std::nullopt)
      : settings_(gateway::settings_from_env()) {
    if (!o.fixture.empty()) settings_.fixture_path = o.fixture;
    if (scenario_fixture && !settings_.fixture_path) settings_.fixture_path = scenario_fixture;
    if (!o.provider_mode.empty()) {
      settings_.mode = gateway::provider_mode_from_string(o.provider_mode);
    } else if (scenario_fixture && !std::getenv("PC_PROVIDER_MODE")) {
      settings_.mode = gateway::ProviderMode::replay;
    }
    data_dir_ = o.data_dir;
    explicit_data_dir_ = app.count("--data-dir") > 0 || std::getenv("PC_DATA_DIR");
    server_ = o.server;
  }

  void use_temp_data_dir_unless_explicit() {
    if (explicit_data_dir_) return;
    temp_.emplace();
    data_dir_ = temp_->path().string();
  }

  void set_provider(std::shared_ptr<gateway::Provider> p) { provider_ = std::move(p); }

  gateway::GatewaySettings& settings() { return settings_; }

  Backend& backend() {
    if (backend_) return *backend_;
    if (!server_.empty()) {
      backend_ = make_http_backend(server_);
      return *backend_;
    }
    return *(backend_ = make_in_process_backend(service()));
  }

  service::Service& service() {
    if (service_) return *service_;
    store_.emplace(fs::path(data_dir_));
    if (!provider_) {
      const auto settings = settings_;
      provider_ = std::make_shared<LazyProvider>([settings] { return gateway::make_provider(settings); });
    }
    gateway_ = std::make_shared<gateway::Gateway>(provider_, settings_.provider.max_retries);
    service_.emplace(*store_, gateway_, service::ServiceOptions{settings_.provider.default_temperature});
    return *service_;
  }

private:
  gateway::GatewaySettings settings_;
  std::string data_dir_;
  bool explicit_data_dir_ = false;
  std::string server_;
  std::optional<TempDataDir> temp_;
  std::shared_ptr<gateway::Provider> provider_;
  std::optional<store::WorkspaceStore> store_;
  std::shared_ptr<gateway::Gateway> gateway_;
  std::optional<service::Service> service_;
  std::unique_ptr<Backend> backend_;
};

void print_widget_options(std::ostream& out, const core::ControlWidget& w, bool as_json) {
  if (as_json) {
    out << service::wire_dump(store::to_json(w)) << '\n';
    return;
  }
  for (const auto& o : w.options) out << o << '\n';
}

int run_scenario_command(Context& ctx, const Scenario& scenario, std::ostream& out, std::ostream& err) {
  ctx.use_temp_data_dir_unless_explicit();
  const auto report = run_scenario(scenario, ctx.backend(), &out);
  const auto passed = std::count_if(report.steps.begin(), report.steps.end(), [](const auto& s) { return s.ok; });
  if (report.passed()) {
    out << fmt::format("PASS {}/{} steps\n", passed, scenario.steps.size());
  } else {
    const auto& last = report.steps.back();
    out << fmt::format("FAIL at step {} (line {})\n", last.index, last.line);
    if (report.error) err << "error: " << to_string(report.error->code()) << ": " << report.error->what() << '\n';
  }
  return report.exit_status();
}

std::pair<std::string, int> split_bind(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::malformed_request, "bind address must be host:port");
  try {
    return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::malformed_request, "bad port in bind address " + addr);
  }
}

int serve(Context& ctx, const std::string& addr, std::ostream& out) {
  auto [host, port] = split_bind(addr);
  service::ApiServer server(ctx.service());
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  const int bound = server.bind(host, port);
  out << fmt::format("listening on http://{}:{}\n", host, bound) << std::flush;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  waiter.join();
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Headless driver for workspaces, model flows, scenarios and fixtures", "pc"};
  app.require_subcommand(1);
  Options o;
  o.data_dir = env_or("PC_DATA_DIR", "pc-data");
  app.add_option("--data-dir", o.data_dir, "Store directory (env PC_DATA_DIR)");
  app.add_option("--provider-mode", o.provider_mode, "live, replay or record (env PC_PROVIDER_MODE)")
      ->check(CLI::IsMember({"live", "replay", "record"}));
  app.add_option("--fixture", o.fixture, "Fixture file (env PC_FIXTURE_PATH)");
  app.add_option("--server", o.server, "Talk to a running server, e.g. http://127.0.0.1:8080");
  app.add_flag("--json", o.json_output, "Machine-readable output");
  app.add_flag("-v,--verbose", o.verbose, "Debug logging on stderr");

  // workspace
  auto* ws = app.add_subcommand("workspace", "Manage workspaces")->require_subcommand(1);
  auto* ws_create = ws->add_subcommand("create", "Create a workspace; prints its id");
  ws_create->add_option("name", o.name)->required();
  auto* ws_list = ws->add_subcommand("list", "List workspaces, most recently modified first");
  auto* ws_show = ws->add_subcommand("show", "Print a workspace as JSON");
  ws_show->add_option("id", o.id)->required();
  auto* ws_rename = ws->add_subcommand("rename", "Rename a workspace");
  ws_rename->add_option("id", o.id)->required();
  ws_rename->add_option("name", o.name)->required();
  auto* ws_dup = ws->add_subcommand("duplicate", "Copy a workspace; prints the new id");
  ws_dup->add_option("id", o.id)->required();
  ws_dup->add_option("name", o.name)->required();
  auto* ws_delete = ws->add_subcommand("delete", "Delete a workspace");
  ws_delete->add_option("id", o.id)->required();

  // flow
  auto* flow = app.add_subcommand("flow", "Run one model flow")->require_subcommand(1);
  auto with_workspace = [&](CLI::App* c) { c->add_option("--workspace", o.workspace)->required(); };
  auto* f_gen = flow->add_subcommand("generate-widgets", "Propose widgets for the document");
  with_workspace(f_gen);
  f_gen->add_option("--guiding-prompt", o.guiding_prompt);
  auto* f_suggest = flow->add_subcommand("suggest-options", "Suggest two options for a widget");
  with_workspace(f_suggest);
  f_suggest->add_option("--widget", o.widget)->required();
  f_suggest->add_option("--guiding-prompt", o.guiding_prompt);
  auto* f_extract = flow->add_subcommand("extract", "Extract a widget's value from the document");
  with_workspace(f_extract);
  f_extract->add_option("--widget", o.widget)->required();
  auto* f_rephrase = flow->add_subcommand("rephrase", "Rewrite the document from active widgets");
  with_workspace(f_rephrase);
  auto* f_prompt = flow->add_subcommand("prompt", "Rewrite or generate the document from a prompt");
  with_workspace(f_prompt);
  f_prompt->add_option("--prompt", o.prompt)->required();

  // scenario
  auto* scenario = app.add_subcommand("scenario", "Run scenario scripts")->require_subcommand(1);
  auto* sc_run = scenario->add_subcommand("run", "Run a script and report each step");
  sc_run->add_option("script", o.script)->required();

  // fixture
  auto* fixture = app.add_subcommand("fixture", "Manage recorded model responses")->require_subcommand(1);
  auto* fx_record = fixture->add_subcommand("record", "Run a script against the live model, recording");
  fx_record->add_option("script", o.script)->required();
  auto* fx_verify = fixture->add_subcommand("verify", "Run a script in replay mode and check coverage");
  fx_verify->add_option("script", o.script)->required();
  auto* fx_author = fixture->add_subcommand("author", "Record a script against scripted replies");
  fx_author->add_option("script", o.script)->required();
  fx_author->add_option("--replies", o.replies, "JSON file of {\"replies\": [{flow, response}]}")->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API (env PC_BIND_ADDR)");
  o.bind_addr = env_or("PC_BIND_ADDR", "127.0.0.1:8080");
  serve_cmd->add_option("--bind", o.bind_addr, "host:port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nRun 'pc --help' for usage.\n";
    return kExitUsage;
  }
  route_logs_to_stderr(o.verbose);

  try {
    // ---- scenario and fixture commands parse the script first ----
    if (scenario->parsed() || fixture->parsed()) {
      Scenario script;
      try {
        script = load_scenario(o.script);
      } catch (const ScriptError& e) {
        err << "script error: " << o.script << ": " << e.what() << '\n';
        return kExitScriptError;
      }
      Context ctx(o, app, script.fixture);
      if (sc_run->parsed()) return run_scenario_command(ctx, script, out, err);

      const auto fixture_path = ctx.settings().fixture_path;
      if (!fixture_path) {
        err << "error: no fixture path (use --fixture, a fixture directive, or PC_FIXTURE_PATH)\n";
        return kExitUsage;
      }
      if (fx_verify->parsed()) {
        auto replay = std::make_shared<gateway::ReplayProvider>(gateway::load_fixture(*fixture_path));
        ctx.set_provider(replay);
        const int status = run_scenario_command(ctx, script, out, err);
        const auto loaded = gateway::load_fixture(*fixture_path);
        std::size_t unused = 0;
        for (const auto& e : loaded.entries) {
          if (replay->calls(e.request_digest) == 0) {
            ++unused;
            err << "warning: unused fixture entry " << prompt::to_string(e.flow) << " " << e.request_digest << '\n';
          }
        }
        if (status == kExitOk) {
          out << fmt::format("fixture covers the script ({} entries, {} unused)\n", loaded.entries.size(), unused);
        }
        return status;
      }
      std::shared_ptr<gateway::Provider> source;
      if (fx_author->parsed()) {
        std::ifstream in(o.replies);
        if (!in) throw Error(ErrorCode::missing_fixture, "cannot read replies file " + o.replies);
        json replies;
        try {
          replies = json::parse(in);
        } catch (const json::exception& e) {
          throw Error(ErrorCode::malformed_request, std::string("replies file is not JSON: ") + e.what());
        }
        source = std::make_shared<gateway::ScriptedProvider>(gateway::scripted_replies_from_json(replies));
        // Authoring is deterministic, so the fixture is rebuilt from scratch.
        std::error_code ec;
        fs::remove(*fixture_path, ec);
      } else {
        source = std::make_shared<gateway::LiveProvider>(ctx.settings().provider);
      }
      ctx.set_provider(std::make_shared<gateway::RecordingProvider>(source, *fixture_path));
      const int status = run_scenario_command(ctx, script, out, err);
      if (status == kExitOk) out << "fixture written to " << fixture_path->string() << '\n';
      return status;
    }

    Context ctx(o, app);
    if (serve_cmd->parsed()) return serve(ctx, o.bind_addr, out);

    auto& backend = ctx.backend();
    if (ws_create->parsed()) {
      const auto created = backend.create_workspace(o.name);
      out << (o.json_output ? service::wire_dump(store::to_json(created)) : created.id) << '\n';
    } else if (ws_list->parsed()) {
      const auto list = backend.list_workspaces();
      if (o.json_output) {
        out << service::wire_dump(list) << '\n';
      } else {
        for (const auto& s : list) {
          out << fmt::format("{}  {}  ({} widgets)\n", s.at("id").get<std::string>(), s.at("name").get<std::string>(),
                             s.at("widget_count").get<std::size_t>());
        }
      }
    } else if (ws_show->parsed()) {
      out << store::to_json(backend.get_workspace(o.id)).dump(2, ' ', false, json::error_handler_t::replace) << '\n';
    } else if (ws_rename->parsed()) {
      const auto renamed = backend.rename_workspace(o.id, o.name);
      out << (o.json_output ? service::wire_dump(store::to_json(renamed)) : renamed.id) << '\n';
    } else if (ws_dup->parsed()) {
      const auto copy = backend.duplicate_workspace(o.id, o.name);
      out << (o.json_output ? service::wire_dump(store::to_json(copy)) : copy.id) << '\n';
    } else if (ws_delete->parsed()) {
      backend.delete_workspace(o.id);
      if (o.json_output) out << service::wire_dump(json{{"deleted", o.id}}) << '\n';
    } else if (f_gen->parsed()) {
      std::optional<std::string> guide;
      if (f_gen->count("--guiding-prompt")) guide = o.guiding_prompt;
      const auto created = backend.generate_widgets(o.workspace, guide);
      if (o.json_output) {
        json arr = json::array();
        for (const auto& w : created) arr.push_back(store::to_json(w));
        out << service::wire_dump(arr) << '\n';
      } else {
        for (const auto& w : created) out << w.id << "  " << w.title << '\n';
      }
    } else if (f_suggest->parsed()) {
      std::optional<std::string> guide;
      if (f_suggest->count("--guiding-prompt")) guide = o.guiding_prompt;
      print_widget_options(out, backend.suggest_options(o.workspace, o.widget, guide), o.json_output);
    } else if (f_extract->parsed()) {
      print_widget_options(out, backend.extract_value(o.workspace, o.widget), o.json_output);
    } else if (f_rephrase->parsed() || f_prompt->parsed()) {
      const auto sink = [&](std::string_view chunk) { out << chunk << std::flush; };
      try {
        const auto done = f_prompt->parsed() ? backend.prompt(o.workspace, o.prompt, sink)
                                             : backend.rephrase(o.workspace, sink);
        if (o.json_output) {
          err << service::wire_dump(json{{"content", done.content}, {"history_length", done.history_length}}) << '\n';
        }
      } catch (...) {
        out << std::flush;
        throw;
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    if (o.json_output) err << service::wire_dump(service::error_body(e)) << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: internal_error: " << e.what() << '\n';
    return exit_code(ErrorCode::internal_error);
  }
}

}  // namespace pc::cli
