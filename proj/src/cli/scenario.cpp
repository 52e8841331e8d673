#include "pc/cli/scenario.hpp"

#include "pc/core/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pc::cli {
namespace fs = std::filesystem;

ScriptError::ScriptError(std::size_t line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line) {}

namespace {

std::vector<std::string> tokenize(std::string_view line, std::size_t lineno) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::string word;
    if (line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        const char c = line[i++];
        if (c == '"') {
          closed = true;
          break;
        }
        if (c == '\\' && i < line.size()) {
          const char e = line[i++];
          word += e == 'n' ? '\n' : e;
        } else {
          word += c;
        }
      }
      if (!closed) throw ScriptError(lineno, "unterminated quote");
    } else {
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) word += line[i++];
    }
    out.push_back(std::move(word));
  }
  return out;
}

std::optional<long long> parse_int(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

std::optional<double> parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

class Checker {
public:
  void check(const ScenarioStep& step) {
    const auto& w = step.words;
    const auto& verb = w[0];
    line_ = step.line;
    if (verb == "workspace") {
      arity(w, 2, 2);
      have_workspace_ = true;
      return;
    }
    if (!have_workspace_) fail("'" + verb + "' before any workspace step");

    if (verb == "prompt") {
      arity(w, 2, 2);
    } else if (verb == "rephrase") {
      arity(w, 1, 1);
    } else if (verb == "edit") {
      arity(w, 2, 3);
      if (w.size() == 3 && w[2] != "checkpoint") fail("edit takes an optional 'checkpoint' flag");
    } else if (verb == "revert") {
      arity(w, 2, 2);
      index(w[1]);
    } else if (verb == "generate-widgets") {
      arity(w, 1, 2);
    } else if (verb == "bind") {
      arity(w, 3, 3);
      define(w[1]);
    } else if (verb == "create-widget") {
      arity(w, 4, 4);
      define(w[1]);
      number(w[2]);
      number(w[3]);
    } else if (verb == "move") {
      arity(w, 3, 5);
      use(w[1]);
      if (w[2] == "canvas") {
        arity(w, 5, 5);
        number(w[3]);
        number(w[4]);
      } else if (w[2] == "panel") {
        arity(w, 3, 3);
      } else {
        fail("move target must be canvas or panel");
      }
    } else if (verb == "set-title" || verb == "set-value" || verb == "add-option") {
      arity(w, 3, 3);
      use(w[1]);
    } else if (verb == "suggest") {
      arity(w, 2, 3);
      use(w[1]);
    } else if (verb == "extract" || verb == "save-input" || verb == "delete-widget") {
      arity(w, 2, 2);
      use(w[1]);
    } else if (verb == "select") {
      arity(w, 3, 3);
      use(w[1]);
      index(w[2]);
    } else if (verb == "expect") {
      expectation(w);
    } else {
      fail("unknown step '" + verb + "'");
    }
  }

private:
  void expectation(const std::vector<std::string>& w) {
    if (w.size() < 2) fail("expect needs a subject");
    static const std::set<std::string> counts{"widget_count", "panel_count", "canvas_count",
                                              "fresh_count", "history_length", "active_pairs"};
    const auto& what = w[1];
    if (counts.count(what)) {
      arity(w, 3, 3);
      index(w[2]);
    } else if (what == "document") {
      arity(w, 4, 4);
      if (w[2] != "contains" && w[2] != "equals") fail("expect document contains|equals TEXT");
    } else if (what == "options") {
      arity(w, 4, 4);
      use(w[2]);
      index(w[3]);
    } else if (what == "option") {
      arity(w, 5, 5);
      use(w[2]);
      index(w[3]);
    } else if (what == "value" || what == "title") {
      arity(w, 4, 4);
      use(w[2]);
    } else if (what == "zone") {
      arity(w, 4, 4);
      use(w[2]);
      if (w[3] != "canvas" && w[3] != "panel") fail("zone must be canvas or panel");
    } else {
      fail("unknown expectation '" + what + "'");
    }
  }

  [[noreturn]] void fail(const std::string& message) const { throw ScriptError(line_, message); }

  void arity(const std::vector<std::string>& w, std::size_t lo, std::size_t hi) const {
    if (w.size() < lo || w.size() > hi) {
      fail(fmt::format("'{}' takes {} argument(s), got {}", w[0],
                       lo == hi ? std::to_string(lo - 1) : fmt::format("{}-{}", lo - 1, hi - 1), w.size() - 1));
    }
  }
  void define(const std::string& sym) {
    if (sym.size() < 2 || sym[0] != '$') fail("expected a $symbol, got '" + sym + "'");
    symbols_.insert(sym);
  }
  void use(const std::string& sym) const {
    if (sym.size() < 2 || sym[0] != '$') fail("expected a $symbol, got '" + sym + "'");
    if (!symbols_.count(sym)) fail("undefined symbol " + sym);
  }
  void index(const std::string& s) const {
    const auto v = parse_int(s);
    if (!v || *v < 0) fail("expected a non-negative integer, got '" + s + "'");
  }
  void number(const std::string& s) const {
    if (!parse_number(s)) fail("expected a number, got '" + s + "'");
  }

  std::size_t line_ = 0;
  bool have_workspace_ = false;
  std::set<std::string> symbols_;
};

// ---- execution ----

struct Failed {
  std::string note;
};

std::string join_options(const std::vector<std::string>& options) {
  std::string out = "[";
  for (std::size_t i = 0; i < options.size(); ++i) out += (i ? " | " : "") + options[i];
  return out + "]";
}

class Runner {
public:
  explicit Runner(Backend& backend) : backend_(backend) {}

  std::string run(const std::vector<std::string>& w) {
    const auto& verb = w[0];
    if (verb == "workspace") {
      current_ = backend_.create_workspace(w[1]).id;
      created_.push_back(current_);
      return "created " + w[1];
    }
    if (verb == "prompt" || verb == "rephrase") {
      const auto sink = [](std::string_view) {};
      const auto out = verb == "prompt" ? backend_.prompt(current_, w[1], sink) : backend_.rephrase(current_, sink);
      return fmt::format("{} words, history {}", core::word_count(out.content), out.history_length);
    }
    if (verb == "edit") {
      return fmt::format("history {}", backend_.put_document(current_, w[1], w.size() == 3).history.size());
    }
    if (verb == "revert") {
      const auto doc = backend_.revert_document(current_, index(w[1]));
      return fmt::format("{} words, history {}", core::word_count(doc.content), doc.history.size());
    }
    if (verb == "generate-widgets") {
      std::optional<std::string> guide;
      if (w.size() == 2) guide = w[1];
      const auto created = backend_.generate_widgets(current_, guide);
      std::vector<std::string> titles;
      for (const auto& c : created) titles.push_back(c.title);
      return fmt::format("{} new widget(s) {}", created.size(), join_options(titles));
    }
    if (verb == "bind") {
      const auto ws = backend_.get_workspace(current_);
      const auto it = std::find_if(ws.widgets.begin(), ws.widgets.end(),
                                   [&](const core::ControlWidget& c) { return core::canonical_equal(c.title, w[2]); });
      if (it == ws.widgets.end()) throw Failed{"no widget titled '" + w[2] + "'"};
      symbols_[w[1]] = it->id;
      return w[1] + " = '" + core::trim(it->title) + "'";
    }
    if (verb == "create-widget") {
      const auto c = backend_.create_widget(current_, {*parse_number(w[2]), *parse_number(w[3])});
      symbols_[w[1]] = c.id;
      return w[1] + " created on canvas";
    }
    const auto& id = symbols_.at(w[1]);
    if (verb == "move") {
      std::optional<core::Vec2> pos;
      if (w[2] == "canvas") pos = core::Vec2{*parse_number(w[3]), *parse_number(w[4])};
      const auto c = backend_.move_widget(current_, id, core::zone_from_string(w[2]), pos);
      return w[1] + " -> " + std::string(core::to_string(c.zone));
    }
    if (verb == "set-title") {
      backend_.update_widget(current_, id, {w[2], std::nullopt, std::nullopt});
      return w[1] + " title '" + w[2] + "'";
    }
    if (verb == "set-value") {
      backend_.update_widget(current_, id, {std::nullopt, w[2], std::nullopt});
      return w[1] + " value '" + w[2] + "'";
    }
    if (verb == "select") {
      return w[1] + " value '" + backend_.select_option(current_, id, index(w[2])).value + "'";
    }
    if (verb == "delete-widget") {
      backend_.delete_widget(current_, id);
      return w[1] + " deleted";
    }
    core::ControlWidget c;
    if (verb == "suggest") {
      std::optional<std::string> guide;
      if (w.size() == 3) guide = w[2];
      c = backend_.suggest_options(current_, id, guide);
    } else if (verb == "extract") {
      c = backend_.extract_value(current_, id);
    } else if (verb == "save-input") {
      c = backend_.save_input(current_, id);
    } else if (verb == "add-option") {
      c = backend_.add_option(current_, id, w[2]);
    }
    return w[1] + " options " + join_options(c.options);
  }

  std::string expect(const std::vector<std::string>& w) {
    const auto ws = backend_.get_workspace(current_);
    const auto& what = w[1];
    auto compare = [](const auto& actual, const auto& expected, const std::string& label) {
      if (actual != expected) throw Failed{fmt::format("{}: expected {}, got {}", label, expected, actual)};
      return fmt::format("{} = {}", label, actual);
    };
    auto count = [&](auto pred) {
      return static_cast<std::size_t>(std::count_if(ws.widgets.begin(), ws.widgets.end(), pred));
    };
    if (what == "widget_count") return compare(ws.widgets.size(), index(w[2]), what);
    if (what == "panel_count") {
      return compare(count([](const auto& c) { return c.zone == core::Zone::panel; }), index(w[2]), what);
    }
    if (what == "canvas_count") {
      return compare(count([](const auto& c) { return c.zone == core::Zone::canvas; }), index(w[2]), what);
    }
    if (what == "fresh_count") return compare(count([](const auto& c) { return c.fresh; }), index(w[2]), what);
    if (what == "history_length") return compare(ws.document.history.size(), index(w[2]), what);
    if (what == "active_pairs") return compare(core::active_pairs(ws).size(), index(w[2]), what);
    if (what == "document") {
      const auto& content = ws.document.content;
      const bool ok = w[2] == "equals" ? content == w[3] : content.find(w[3]) != std::string::npos;
      if (!ok) throw Failed{fmt::format("document does not {} '{}'", w[2] == "equals" ? "equal" : "contain", w[3])};
      return "document " + w[2] + " '" + w[3] + "'";
    }
    const auto& c = core::widget_at(ws, symbols_.at(w[2]));
    if (what == "options") return compare(c.options.size(), index(w[3]), w[2] + " options");
    if (what == "option") {
      const auto i = index(w[3]);
      if (i >= c.options.size()) throw Failed{fmt::format("{} has no option {}", w[2], i)};
      return compare(c.options[i], w[4], fmt::format("{} option {}", w[2], i));
    }
    if (what == "value") return compare(c.value, w[3], w[2] + " value");
    if (what == "title") return compare(c.title, w[3], w[2] + " title");
    return compare(std::string(core::to_string(c.zone)), w[3], w[2] + " zone");
  }

  std::vector<core::Workspace> workspaces() {
    std::vector<core::Workspace> out;
    for (const auto& id : created_) {
      try {
        out.push_back(backend_.get_workspace(id));
      } catch (const Error&) {
      }
    }
    return out;
  }

private:
  static std::size_t index(const std::string& s) { return static_cast<std::size_t>(*parse_int(s)); }

  Backend& backend_;
  std::string current_;
  std::vector<std::string> created_;
  std::map<std::string, std::string> symbols_;
};

}  // namespace

Scenario parse_scenario(std::string_view text, const fs::path& base_dir) {
  Scenario out;
  Checker checker;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto trimmed = core::trim(raw);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    ScenarioStep step{lineno, std::string(trimmed), tokenize(trimmed, lineno), std::nullopt};
    if (step.words[0] == "fixture") {
      if (step.words.size() != 2) throw ScriptError(lineno, "fixture takes one path");
      if (out.fixture) throw ScriptError(lineno, "only one fixture directive is allowed");
      fs::path p = step.words[1];
      out.fixture = p.is_absolute() ? p : base_dir / p;
      continue;
    }
    if (step.words[0] == "fails") {
      if (step.words.size() < 3) throw ScriptError(lineno, "fails CODE <step>");
      try {
        step.expected_error = error_code_from_string(step.words[1]);
      } catch (const std::invalid_argument&) {
        throw ScriptError(lineno, "unknown error code '" + step.words[1] + "'");
      }
      step.words.erase(step.words.begin(), step.words.begin() + 2);
      if (step.words[0] == "expect") throw ScriptError(lineno, "expectations cannot be wrapped in fails");
    }
    checker.check(step);
    out.steps.push_back(std::move(step));
  }
  return out;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScriptError(0, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.parent_path());
}

bool ScenarioReport::passed() const {
  return !error && std::all_of(steps.begin(), steps.end(), [](const StepResult& s) { return s.ok; });
}

int ScenarioReport::exit_status() const {
  if (error) return exit_code(error->code());
  return passed() ? kExitOk : kExitExpectationFailed;
}

std::string format_step(const StepResult& r) {
  return fmt::format("[{:>2}] {:<4} {}{}{}", r.index, r.ok ? "ok" : "FAIL", r.source, r.note.empty() ? "" : "  -> ",
                     r.note);
}

ScenarioReport run_scenario(const Scenario& scenario, Backend& backend, std::ostream* progress) {
  ScenarioReport report;
  Runner runner(backend);
  for (std::size_t i = 0; i < scenario.steps.size(); ++i) {
    const auto& step = scenario.steps[i];
    StepResult r{i + 1, step.line, step.source, false, {}};
    try {
      const bool is_expect = step.words[0] == "expect";
      const auto note = is_expect ? runner.expect(step.words) : runner.run(step.words);
      if (step.expected_error) {
        r.note = "expected " + std::string(to_string(*step.expected_error)) + ", but the step succeeded";
      } else {
        r.ok = true;
        r.note = note;
      }
    } catch (const Failed& f) {
      r.note = f.note;
    } catch (const Error& e) {
      if (step.expected_error == e.code()) {
        r.ok = true;
        r.note = "failed as expected: " + std::string(to_string(e.code()));
      } else if (step.expected_error) {
        r.note = fmt::format("expected {}, got {}: {}", to_string(*step.expected_error), to_string(e.code()),
                             e.what());
      } else {
        r.note = fmt::format("error {}: {}", to_string(e.code()), e.what());
        report.error = e;
      }
    }
    if (progress) *progress << format_step(r) << '\n' << std::flush;
    report.steps.push_back(std::move(r));
    if (!report.steps.back().ok) break;
  }
  report.workspaces = runner.workspaces();
  return report;
}

}  // namespace pc::cli
