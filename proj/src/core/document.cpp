#include "pc/core/document.hpp"

#include "pc/error.hpp"

#include <array>

namespace pc::core {

Document push_revision(Document doc, std::string new_text, RevisionCause cause,
                       Timestamp at) {
  doc.history.push_back(Revision{std::move(doc.content), cause, at, std::nullopt});
  doc.content = std::move(new_text);
  return doc;
}

Document revert_to(Document doc, std::size_t revision_index, Timestamp at) {
  if (revision_index >= doc.history.size()) {
    throw Error(ErrorCode::index_out_of_range,
                "revision " + std::to_string(revision_index) + " does not exist",
                {{"index", revision_index}, {"size", doc.history.size()}});
  }
  std::string restored = doc.history[revision_index].text;
  doc.history.push_back(
      Revision{std::move(doc.content), RevisionCause::revert, at, revision_index});
  doc.content = std::move(restored);
  return doc;
}

namespace {

constexpr std::array<std::pair<RevisionCause, std::string_view>, 5> kCauseNames{{
    {RevisionCause::user_edit, "user_edit"},
    {RevisionCause::generate, "generate"},
    {RevisionCause::rephrase_widgets, "rephrase_widgets"},
    {RevisionCause::apply_prompt, "apply_prompt"},
    {RevisionCause::revert, "revert"},
}};

}  // namespace

std::string_view to_string(RevisionCause cause) {
  for (const auto& [c, name] : kCauseNames) {
    if (c == cause) return name;
  }
  return "user_edit";
}

RevisionCause revision_cause_from_string(std::string_view s) {
  for (const auto& [c, name] : kCauseNames) {
    if (name == s) return c;
  }
  throw Error(ErrorCode::malformed_request, "unknown revision cause: " + std::string(s));
}

}  // namespace pc::core
