#include "pc/error.hpp"

#include <array>
#include <span>

namespace pc {
namespace {

struct CodeInfo {
  ErrorCode code;
  std::string_view name;
  int status;
  int exit;
};

// Exit codes: 2 = rejected request, 3 = upstream model/fixture failure,
// 4 = local storage or internal failure.
constexpr std::array kCodes{
    CodeInfo{ErrorCode::empty_option, "empty_option", 400, 2},
    CodeInfo{ErrorCode::empty_value, "empty_value", 400, 2},
    CodeInfo{ErrorCode::empty_title, "empty_title", 400, 2},
    CodeInfo{ErrorCode::empty_text, "empty_text", 400, 2},
    CodeInfo{ErrorCode::empty_prompt, "empty_prompt", 400, 2},
    CodeInfo{ErrorCode::empty_name, "empty_name", 400, 2},
    CodeInfo{ErrorCode::index_out_of_range, "index_out_of_range", 400, 2},
    CodeInfo{ErrorCode::unknown_widget, "unknown_widget", 404, 2},
    CodeInfo{ErrorCode::unknown_workspace, "unknown_workspace", 404, 2},
    CodeInfo{ErrorCode::no_active_widgets, "no_active_widgets", 409, 2},
    CodeInfo{ErrorCode::name_conflict, "name_conflict", 409, 2},
    CodeInfo{ErrorCode::flow_in_progress, "flow_in_progress", 409, 2},
    CodeInfo{ErrorCode::malformed_request, "malformed_request", 400, 2},
    CodeInfo{ErrorCode::not_found, "not_found", 404, 2},
    CodeInfo{ErrorCode::schema_violation, "schema_violation", 502, 3},
    CodeInfo{ErrorCode::duplicate_options, "duplicate_options", 502, 3},
    CodeInfo{ErrorCode::schema_violation_exhausted, "schema_violation_exhausted", 502, 3},
    CodeInfo{ErrorCode::provider_unavailable, "provider_unavailable", 503, 3},
    CodeInfo{ErrorCode::auth_failure, "auth_failure", 502, 3},
    CodeInfo{ErrorCode::missing_fixture, "missing_fixture", 502, 3},
    CodeInfo{ErrorCode::fixture_write_error, "fixture_write_error", 500, 4},
    CodeInfo{ErrorCode::storage_failure, "storage_failure", 500, 4},
    CodeInfo{ErrorCode::internal_error, "internal_error", 500, 4},
};

constexpr std::array<ErrorCode, kCodes.size()> make_code_list() {
  std::array<ErrorCode, kCodes.size()> out{};
  for (std::size_t i = 0; i < kCodes.size(); ++i) out[i] = kCodes[i].code;
  return out;
}

constexpr auto kCodeList = make_code_list();

const CodeInfo& info(ErrorCode code) {
  for (const auto& c : kCodes) {
    if (c.code == code) return c;
  }
  return kCodes.back();
}

}  // namespace

std::string_view to_string(ErrorCode code) { return info(code).name; }

ErrorCode error_code_from_string(std::string_view name) {
  for (const auto& c : kCodes) {
    if (c.name == name) return c.code;
  }
  throw std::invalid_argument("unknown error code: " + std::string(name));
}

int http_status(ErrorCode code) { return info(code).status; }

int exit_code(ErrorCode code) { return info(code).exit; }

std::span<const ErrorCode> all_error_codes() { return kCodeList; }

}  // namespace pc
