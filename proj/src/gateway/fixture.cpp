#include "pc/gateway/fixture.hpp"

#include "pc/error.hpp"
#include "pc/gateway/digest.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace pc::gateway {

using nlohmann::json;

const FixtureEntry* Fixture::find(std::string_view digest) const noexcept {
  for (const auto& e : entries) {
    if (e.request_digest == digest) return &e;
  }
  return nullptr;
}

json to_json(const FixtureResponse& response) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, StructuredResponse>) {
          return {{"kind", "structured"}, {"payload", r.payload}};
        } else if constexpr (std::is_same_v<T, SequenceResponse>) {
          return {{"kind", "sequence"}, {"payloads", r.payloads}};
        } else {
          json j = {{"kind", "stream"}, {"chunks", r.chunks}};
          if (r.fault_after) j["fault_after"] = *r.fault_after;
          return j;
        }
      },
      response);
}

namespace {

FixtureResponse response_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "structured") return StructuredResponse{j.at("payload")};
  if (kind == "sequence") {
    SequenceResponse r{j.at("payloads").get<std::vector<json>>()};
    if (r.payloads.empty()) throw std::invalid_argument("sequence response without payloads");
    return r;
  }
  if (kind == "stream") {
    StreamResponse r{j.at("chunks").get<std::vector<std::string>>(), std::nullopt};
    if (j.contains("fault_after")) r.fault_after = j.at("fault_after").get<std::size_t>();
    return r;
  }
  throw std::invalid_argument("unknown response kind: " + kind);
}

}  // namespace

FixtureResponse fixture_response_from_json(const json& j) {
  try {
    return response_from_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed_request, std::string("malformed fixture response: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::malformed_request, std::string("malformed fixture response: ") + e.what());
  }
}

json to_json(const Fixture& fixture) {
  json entries = json::array();
  for (const auto& e : fixture.entries) {
    entries.push_back({{"flow", prompt::to_string(e.flow)},
                       {"request_digest", e.request_digest},
                       {"request", e.request},
                       {"response", to_json(e.response)}});
  }
  return {{"version", 1}, {"entries", std::move(entries)}};
}

Fixture fixture_from_json(const json& j) {
  Fixture f;
  std::set<std::string> digests;
  try {
    for (const auto& e : j.at("entries")) {
      FixtureEntry entry;
      entry.flow = prompt::flow_from_string(e.at("flow").get<std::string>());
      entry.request_digest = e.at("request_digest").get<std::string>();
      entry.request = e.value("request", json());
      entry.response = response_from_json(e.at("response"));
      if (!digests.insert(entry.request_digest).second) {
        throw Error(ErrorCode::malformed_request, "duplicate digest in fixture: " + entry.request_digest);
      }
      f.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed_request, std::string("malformed fixture: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::malformed_request, std::string("malformed fixture: ") + e.what());
  }
  return f;
}

Fixture load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::missing_fixture, "fixture file not found: " + path.string(),
                {{"path", path.string()}});
  }
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::malformed_request, "fixture is not valid JSON: " + std::string(e.what()),
                {{"path", path.string()}});
  }
  return fixture_from_json(j);
}

void save_fixture(const std::filesystem::path& path, const Fixture& fixture) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const auto tmp = fs::path(path.string() + ".tmp" + std::to_string(std::random_device{}()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << to_json(fixture).dump(2) << '\n';
    out.flush();
    if (!out) {
      throw Error(ErrorCode::fixture_write_error, "cannot write fixture " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::fixture_write_error, "cannot replace fixture " + path.string());
  }
}

namespace {

FixtureEntry entry_for(const prompt::FlowRequest& request, FixtureResponse response) {
  auto canonical = canonical_request(request);
  auto digest = digest_of(canonical);
  return {request.flow, std::move(digest), std::move(canonical), std::move(response)};
}

}  // namespace

FixtureEntry structured_entry(const prompt::FlowRequest& request, json payload) {
  return entry_for(request, StructuredResponse{std::move(payload)});
}

FixtureEntry sequence_entry(const prompt::FlowRequest& request, std::vector<json> payloads) {
  return entry_for(request, SequenceResponse{std::move(payloads)});
}

FixtureEntry stream_entry(const prompt::FlowRequest& request, std::vector<std::string> chunks,
                          std::optional<std::size_t> fault_after) {
  return entry_for(request, StreamResponse{std::move(chunks), fault_after});
}

}  // namespace pc::gateway
