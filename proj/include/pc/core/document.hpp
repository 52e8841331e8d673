#pragma once

#include "pc/core/clock.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pc::core {

enum class RevisionCause { user_edit, generate, rephrase_widgets, apply_prompt, revert };

/// Snapshot of the content that was replaced, and why it was replaced.
struct Revision {
  std::string text;
  RevisionCause cause = RevisionCause::user_edit;
  Timestamp timestamp{};
  std::optional<std::size_t> source_revision;  // set iff cause == revert

  friend bool operator==(const Revision&, const Revision&) = default;
};

struct Document {
  std::string content;
  std::vector<Revision> history;

  friend bool operator==(const Document&, const Document&) = default;
};

/// Records the prior content as a revision, then replaces it. No-op edits
/// are recorded too; suppressing them is the caller's job.
Document push_revision(Document doc, std::string new_text, RevisionCause cause,
                       Timestamp at = now());

/// Restores history[revision_index] and appends a revert revision holding
/// the replaced content. Throws Error(index_out_of_range).
Document revert_to(Document doc, std::size_t revision_index, Timestamp at = now());

std::string_view to_string(RevisionCause cause);
RevisionCause revision_cause_from_string(std::string_view s);

}  // namespace pc::core
