#pragma once

#include "pc/core/clock.hpp"
#include "pc/core/document.hpp"
#include "pc/core/widget.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pc::core {

struct Viewport {
  Vec2 pan;
  double zoom = 1.0;  // > 0
  friend bool operator==(const Viewport&, const Viewport&) = default;
};

/// One named canvas. `widgets` is kept in creation order.
struct Workspace {
  std::string id;
  std::string name;
  std::vector<ControlWidget> widgets;
  Document document;
  Viewport viewport;
  Timestamp created_at{};
  Timestamp modified_at{};

  friend bool operator==(const Workspace&, const Workspace&) = default;
};

using LabelValue = std::pair<std::string, std::string>;

ControlWidget* find_widget(Workspace& ws, std::string_view widget_id) noexcept;
const ControlWidget* find_widget(const Workspace& ws, std::string_view widget_id) noexcept;

/// Throws Error(unknown_widget).
ControlWidget& widget_at(Workspace& ws, std::string_view widget_id);
const ControlWidget& widget_at(const Workspace& ws, std::string_view widget_id);

/// Moving onto the canvas places the widget (keeping its old position when
/// none is given) and clears `fresh`; moving to the panel clears position.
Workspace move_widget(Workspace ws, std::string_view widget_id, Zone target_zone,
                      std::optional<Vec2> position = std::nullopt);

/// Clears the fresh flag without moving the widget.
Workspace acknowledge_widget(Workspace ws, std::string_view widget_id);

Workspace remove_widget(Workspace ws, std::string_view widget_id);

/// (title, value) of every canvas widget whose trimmed title and value are
/// both nonempty, in creation order. Emitted values are trimmed.
std::vector<LabelValue> active_pairs(const Workspace& ws);

/// Titles of every widget in either zone.
std::vector<std::string> widget_labels(const Workspace& ws);

}  // namespace pc::core
