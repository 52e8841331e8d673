#pragma once

#include <nlohmann/json.hpp>

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pc {

/// Closed set of failure codes. Every domain error maps to exactly one code,
/// and every code maps to one HTTP status and one CLI exit code.
enum class ErrorCode {
  empty_option,
  empty_value,
  empty_title,
  empty_text,
  empty_prompt,
  empty_name,
  index_out_of_range,
  unknown_widget,
  unknown_workspace,
  no_active_widgets,
  name_conflict,
  flow_in_progress,
  malformed_request,
  not_found,
  schema_violation,
  duplicate_options,
  schema_violation_exhausted,
  provider_unavailable,
  auth_failure,
  missing_fixture,
  fixture_write_error,
  storage_failure,
  internal_error,
};

std::string_view to_string(ErrorCode code);
ErrorCode error_code_from_string(std::string_view name);
int http_status(ErrorCode code);
int exit_code(ErrorCode code);

/// All codes, in declaration order.
std::span<const ErrorCode> all_error_codes();

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message, nlohmann::json detail = nullptr)
      : std::runtime_error(std::move(message)), code_(code),
        detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& detail() const noexcept { return detail_; }

private:
  ErrorCode code_;
  nlohmann::json detail_;
};

// CLI exit codes that do not correspond to an ErrorCode.
inline constexpr int kExitOk = 0;
inline constexpr int kExitExpectationFailed = 1;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitScriptError = 65;

}  // namespace pc
