#pragma once

#include "pc/core/workspace.hpp"
#include "pc/store/log.hpp"

#include <map>
#include <string>
#include <vector>

// Log details written by mutating operations, by event:
//
//   workspace_event  {action: created, name}
//                    {action: duplicated, source_id, name, widget_ids: {old: new}}
//                    {action: renamed, name}
//                    {action: deleted}
//                    {action: widget_deleted, widget_id}
//                    {action: document_edited, content}
//                    {action: viewport_set, viewport}
//   widget_created   {widget}
//   widget_moved     {widget_id, zone, position, size, fresh}
//   option_added     {widget_id, option}
//   value_set        {widget_id, title?, value?}
//   revision_pushed  {content, cause, at}
//   reverted         {index, at}
//
// flow_started / flow_completed / flow_failed carry diagnostics only.

namespace pc::store {

/// Folds the log into the workspaces it describes. created_at and
/// modified_at are taken from entry timestamps, so only content (name,
/// widgets, document, viewport) is expected to match the store.
/// Throws Error(malformed_request) if an entry cannot be applied.
std::map<std::string, core::Workspace> rebuild_from_log(const std::vector<LogEntry>& entries);

/// Workspace with created_at / modified_at zeroed, for content comparison.
core::Workspace content_of(core::Workspace ws);

}  // namespace pc::store
