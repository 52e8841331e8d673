#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pc::gateway {

struct SseEvent {
  std::string event = "message";
  std::string data;
  friend bool operator==(const SseEvent&, const SseEvent&) = default;
};

/// Incremental text/event-stream decoder. Bytes may arrive split anywhere,
/// including inside a line or a CRLF pair.
class SseDecoder {
public:
  /// Returns the events completed by this chunk.
  std::vector<SseEvent> feed(std::string_view bytes);

private:
  void process_line(std::string_view line, std::vector<SseEvent>& out);

  std::string buffer_;
  std::string event_;
  std::string data_;
  bool has_data_ = false;
  bool pending_cr_ = false;
};

/// One event frame. Multi-line data is split across several `data:` lines.
std::string encode_sse(std::string_view event, std::string_view data);

}  // namespace pc::gateway
