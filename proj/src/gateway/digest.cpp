#include "pc/gateway/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fmt/format.h>
#include <memory>
#include <stdexcept>

namespace pc::gateway {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

nlohmann::json canonical_request(const prompt::FlowRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"content", m.content}, {"role", prompt::to_string(m.role)}});
  }
  return {
      {"flow", prompt::to_string(request.flow)},
      {"messages", std::move(messages)},
      {"schema_id", request.response_schema ? nlohmann::json(request.response_schema->id) : nlohmann::json()},
      {"temperature", request.temperature},
  };
}

std::string digest_of(const nlohmann::json& canonical) {
  // nlohmann::json objects are std::map backed, so dump() emits sorted keys.
  return sha256_hex(nlohmann::json(canonical).dump());
}

std::string request_digest(const prompt::FlowRequest& request) {
  return digest_of(canonical_request(request));
}

}  // namespace pc::gateway
