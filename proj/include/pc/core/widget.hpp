#pragma once

#include "pc/core/ids.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pc::core {

enum class Zone { panel, canvas };
enum class Origin { suggested, prompted, manual };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Size2 {
  double width = 240.0;
  double height = 120.0;
  friend bool operator==(const Size2&, const Size2&) = default;
};

/// Most widget generations ask for at most this many options per widget.
inline constexpr std::size_t kMaxSpecOptions = 3;

/// A reified text attribute. Options are stored newest first and are unique
/// under canonical_equal. `position` is set iff zone == canvas; `fresh` is
/// only ever true while the widget sits in the panel.
struct ControlWidget {
  std::string id;
  std::string title;
  std::string value;
  std::vector<std::string> options;
  Zone zone = Zone::panel;
  std::optional<Vec2> position;
  Size2 size;
  bool fresh = false;
  Origin origin = Origin::manual;

  friend bool operator==(const ControlWidget&, const ControlWidget&) = default;
};

/// Model-proposed widget before it is assigned an id.
struct WidgetSpec {
  std::string label;
  std::string value;
  std::vector<std::string> options;

  friend bool operator==(const WidgetSpec&, const WidgetSpec&) = default;
};

ControlWidget create_empty_widget(Vec2 position, std::string id = random_uuid());

/// Inserts the trimmed option at index 0 unless an equal option exists.
/// Throws Error(empty_option) for whitespace-only input.
ControlWidget add_option(ControlWidget widget, std::string_view option);

/// True when add_option would change the list.
bool has_option(const ControlWidget& widget, std::string_view option) noexcept;

/// add_option(widget, widget.value). Throws Error(empty_value).
ControlWidget save_input(ControlWidget widget);

/// Throws Error(index_out_of_range).
ControlWidget set_value_from_option(ControlWidget widget, std::size_t option_index);

/// Drops drafts whose label matches an existing title or an earlier draft
/// label, then dedups each survivor's options and keeps the first three.
std::vector<WidgetSpec> dedup_new_widgets(std::vector<WidgetSpec> drafts,
                                          const std::vector<ControlWidget>& existing);

/// Materializes a spec into a panel widget with fresh=true.
ControlWidget widget_from_spec(const WidgetSpec& spec, Origin origin,
                               std::string id = random_uuid());

std::string_view to_string(Zone zone);
std::string_view to_string(Origin origin);
Zone zone_from_string(std::string_view s);
Origin origin_from_string(std::string_view s);

}  // namespace pc::core
