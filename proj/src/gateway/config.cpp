#include "pc/gateway/config.hpp"

#include "pc/error.hpp"
#include "pc/gateway/live.hpp"
#include "pc/gateway/recording.hpp"
#include "pc/gateway/replay.hpp"

#include <cstdlib>

namespace pc::gateway {
namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

template <typename T>
T parse_number(const std::string& name, const std::string& value) {
  try {
    std::size_t used = 0;
    T out;
    if constexpr (std::is_floating_point_v<T>) {
      out = static_cast<T>(std::stod(value, &used));
    } else {
      out = static_cast<T>(std::stoll(value, &used));
    }
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw Error(ErrorCode::malformed_request, name + " is not a number: " + value);
  }
}

}  // namespace

GatewaySettings settings_from_env() {
  GatewaySettings s;
  if (auto v = env("PC_LLM_BASE_URL")) s.provider.base_url = *v;
  if (auto v = env("PC_LLM_API_KEY")) s.provider.api_key = *v;
  if (auto v = env("PC_LLM_MODEL")) s.provider.model_name = *v;
  if (auto v = env("PC_LLM_TEMPERATURE")) {
    s.provider.default_temperature = parse_number<double>("PC_LLM_TEMPERATURE", *v);
  }
  if (auto v = env("PC_LLM_MAX_RETRIES")) {
    s.provider.max_retries = parse_number<int>("PC_LLM_MAX_RETRIES", *v);
    if (s.provider.max_retries < 0) throw Error(ErrorCode::malformed_request, "PC_LLM_MAX_RETRIES must be >= 0");
  }
  if (auto v = env("PC_LLM_TIMEOUT_MS")) {
    const auto ms = parse_number<long long>("PC_LLM_TIMEOUT_MS", *v);
    if (ms <= 0) throw Error(ErrorCode::malformed_request, "PC_LLM_TIMEOUT_MS must be > 0");
    s.provider.timeout = std::chrono::milliseconds(ms);
  }
  if (auto v = env("PC_FIXTURE_PATH")) s.fixture_path = *v;
  if (auto v = env("PC_PROVIDER_MODE")) s.mode = provider_mode_from_string(*v);
  return s;
}

std::string_view to_string(ProviderMode mode) {
  switch (mode) {
    case ProviderMode::live: return "live";
    case ProviderMode::replay: return "replay";
    case ProviderMode::record: return "record";
  }
  return "live";
}

ProviderMode provider_mode_from_string(std::string_view s) {
  if (s == "live") return ProviderMode::live;
  if (s == "replay") return ProviderMode::replay;
  if (s == "record") return ProviderMode::record;
  throw Error(ErrorCode::malformed_request, "unknown provider mode: " + std::string(s));
}

std::shared_ptr<Provider> make_provider(const GatewaySettings& settings) {
  switch (settings.mode) {
    case ProviderMode::live:
      return std::make_shared<LiveProvider>(settings.provider);
    case ProviderMode::replay:
      if (!settings.fixture_path) {
        throw Error(ErrorCode::missing_fixture, "replay mode needs a fixture path (PC_FIXTURE_PATH)");
      }
      return std::make_shared<ReplayProvider>(load_fixture(*settings.fixture_path));
    case ProviderMode::record:
      if (!settings.fixture_path) {
        throw Error(ErrorCode::fixture_write_error, "record mode needs a fixture path (PC_FIXTURE_PATH)");
      }
      return std::make_shared<RecordingProvider>(std::make_shared<LiveProvider>(settings.provider),
                                                 *settings.fixture_path);
  }
  throw Error(ErrorCode::internal_error, "unhandled provider mode");
}

}  // namespace pc::gateway
