#pragma once

#include "pc/cli/backend.hpp"
#include "pc/error.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pc::cli {

// Scenario scripts are line based. Blank lines and lines starting with '#'
// are ignored; arguments are separated by whitespace and may be quoted with
// double quotes (escapes: \" \\ \n). Widgets are referred to by $symbols,
// which must be introduced by `bind` or `create-widget` before use.
//
//   fixture PATH                  replay fixture, relative to the script
//   workspace NAME                create a workspace and make it current
//   prompt TEXT
//   rephrase
//   edit TEXT [checkpoint]
//   revert INDEX
//   generate-widgets [GUIDING_PROMPT]
//   bind $w TITLE                 name the widget whose trimmed title is TITLE
//   create-widget $w X Y
//   move $w canvas X Y | move $w panel
//   set-title $w TEXT | set-value $w TEXT
//   suggest $w [GUIDING_PROMPT] | extract $w | save-input $w
//   select $w INDEX | add-option $w TEXT | delete-widget $w
//   fails CODE <step>             the step must fail with that error code
//   expect widget_count|panel_count|canvas_count|fresh_count N
//   expect history_length|active_pairs N
//   expect document contains|equals TEXT
//   expect options $w N | expect option $w INDEX TEXT
//   expect value|title $w TEXT | expect zone $w canvas|panel

/// Parse failure; carries the 1-based line number.
class ScriptError : public std::runtime_error {
public:
  ScriptError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

struct ScenarioStep {
  std::size_t line = 0;
  std::string source;              // the line as written, trimmed
  std::vector<std::string> words;  // tokens after unquoting
  std::optional<ErrorCode> expected_error;
};

struct Scenario {
  std::vector<ScenarioStep> steps;
  std::optional<std::filesystem::path> fixture;  // resolved
};

/// Throws ScriptError.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir);
/// Throws ScriptError, including when the file cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

struct StepResult {
  std::size_t index = 0;  // 1-based
  std::size_t line = 0;
  std::string source;
  bool ok = false;
  std::string note;
  friend bool operator==(const StepResult&, const StepResult&) = default;
};

struct ScenarioReport {
  std::vector<StepResult> steps;
  /// Set when a step raised an unexpected error; the run stopped there.
  std::optional<Error> error;
  /// Workspaces created by the run, in final state.
  std::vector<core::Workspace> workspaces;

  bool passed() const;
  /// kExitOk, kExitExpectationFailed, or exit_code(error).
  int exit_status() const;
};

/// Runs every step in order, stopping at the first failure. When
/// `progress` is set, one report line per step is written as it completes.
ScenarioReport run_scenario(const Scenario& scenario, Backend& backend, std::ostream* progress = nullptr);

std::string format_step(const StepResult& r);

}  // namespace pc::cli
