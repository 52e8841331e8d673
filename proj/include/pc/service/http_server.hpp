#pragma once

#include "pc/error.hpp"
#include "pc/service/service.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <string>

namespace pc::service {

/// JSON body for an error response: {code, message, detail}.
nlohmann::json error_body(const Error& error);

/// Serializes for the wire; invalid UTF-8 is replaced rather than thrown.
std::string wire_dump(const nlohmann::json& j);

/// HTTP + SSE facade over a Service. Routes:
///
///   GET    /healthz, /version
///   POST   /workspaces                         {name}
///   GET    /workspaces
///   GET    /workspaces/{id}
///   PATCH  /workspaces/{id}                    {name?, viewport?}
///   DELETE /workspaces/{id}
///   POST   /workspaces/{id}:duplicate          {name}
///   POST   /workspaces/{id}/widgets            {position?}
///   POST   /workspaces/{id}/widgets:generate   {guiding_prompt?}
///   PATCH  /workspaces/{id}/widgets/{wid}      {title?, value?, size?}
///   DELETE /workspaces/{id}/widgets/{wid}
///   POST   /workspaces/{id}/widgets/{wid}:move        {zone, position?}
///   POST   /workspaces/{id}/widgets/{wid}:save-input
///   POST   /workspaces/{id}/widgets/{wid}:select      {index}
///   POST   /workspaces/{id}/widgets/{wid}/options     {option}
///   POST   /workspaces/{id}/widgets/{wid}/options:suggest  {guiding_prompt?}
///   POST   /workspaces/{id}/widgets/{wid}/options:extract
///   GET    /workspaces/{id}/document
///   PUT    /workspaces/{id}/document           {content, checkpoint?}
///   GET    /workspaces/{id}/document/history
///   POST   /workspaces/{id}/document:revert    {index}
///   POST   /workspaces/{id}/document:rephrase  -> text/event-stream
///   POST   /workspaces/{id}/document:prompt    {prompt} -> text/event-stream
///
/// Stream events are `delta` (JSON string), then `done` ({content,
/// history_length}) or `error` ({code, message, partial}).
class ApiServer {
public:
  explicit ApiServer(Service& service);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Returns the bound port; port 0 picks a free one. Throws
  /// Error(internal_error) if the address cannot be bound.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();
  /// Blocks until the server accepts connections (after listen() started).
  void wait_until_ready();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pc::service
