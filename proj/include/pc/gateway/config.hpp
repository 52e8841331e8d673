#pragma once

#include "pc/gateway/provider.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace pc::gateway {

enum class ProviderMode { live, replay, record };

struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;  // only ever read from the environment
  std::string model_name = "gpt-4o-2024-08-06";
  double default_temperature = 1.06;
  int max_retries = 2;  // schema-violation retries, >= 0
  std::chrono::milliseconds timeout{60'000};
  int network_attempts = 3;
  std::chrono::milliseconds backoff_base{250};
};

struct GatewaySettings {
  ProviderConfig provider;
  ProviderMode mode = ProviderMode::live;
  std::optional<std::filesystem::path> fixture_path;
};

/// Reads PC_LLM_BASE_URL, PC_LLM_API_KEY, PC_LLM_MODEL, PC_LLM_TEMPERATURE,
/// PC_LLM_MAX_RETRIES, PC_LLM_TIMEOUT_MS, PC_FIXTURE_PATH, PC_PROVIDER_MODE.
/// Throws Error(malformed_request) on unparseable values.
GatewaySettings settings_from_env();

std::string_view to_string(ProviderMode mode);
ProviderMode provider_mode_from_string(std::string_view s);

/// Builds the provider for `settings.mode`. Replay and record need a
/// fixture path.
std::shared_ptr<Provider> make_provider(const GatewaySettings& settings);

}  // namespace pc::gateway
