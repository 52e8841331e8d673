#include "pc/core/widget.hpp"

#include "pc/core/text.hpp"
#include "pc/error.hpp"

#include <algorithm>

namespace pc::core {

ControlWidget create_empty_widget(Vec2 position, std::string id) {
  ControlWidget w;
  w.id = std::move(id);
  w.zone = Zone::canvas;
  w.position = position;
  w.origin = Origin::manual;
  w.fresh = false;
  return w;
}

bool has_option(const ControlWidget& widget, std::string_view option) noexcept {
  return std::any_of(widget.options.begin(), widget.options.end(),
                     [&](const std::string& o) { return canonical_equal(o, option); });
}

ControlWidget add_option(ControlWidget widget, std::string_view option) {
  const auto trimmed = trim_view(option);
  if (trimmed.empty()) {
    throw Error(ErrorCode::empty_option, "option is empty after trimming");
  }
  if (!has_option(widget, trimmed)) {
    widget.options.insert(widget.options.begin(), std::string(trimmed));
  }
  return widget;
}

ControlWidget save_input(ControlWidget widget) {
  if (is_blank(widget.value)) {
    throw Error(ErrorCode::empty_value, "widget value is empty");
  }
  const std::string value = widget.value;
  return add_option(std::move(widget), value);
}

ControlWidget set_value_from_option(ControlWidget widget, std::size_t option_index) {
  if (option_index >= widget.options.size()) {
    throw Error(ErrorCode::index_out_of_range,
                "option index " + std::to_string(option_index) + " out of range",
                {{"index", option_index}, {"size", widget.options.size()}});
  }
  widget.value = widget.options[option_index];
  return widget;
}

std::vector<WidgetSpec> dedup_new_widgets(std::vector<WidgetSpec> drafts,
                                          const std::vector<ControlWidget>& existing) {
  std::vector<WidgetSpec> out;
  std::vector<std::string> seen_labels;
  for (const auto& w : existing) seen_labels.push_back(trim(w.title));

  for (auto& draft : drafts) {
    const auto label = trim_view(draft.label);
    if (std::find(seen_labels.begin(), seen_labels.end(), label) != seen_labels.end()) {
      continue;
    }
    seen_labels.emplace_back(label);

    std::vector<std::string> options;
    for (auto& option : draft.options) {
      if (options.size() == kMaxSpecOptions) break;
      const bool dup = std::any_of(options.begin(), options.end(), [&](const std::string& o) {
        return canonical_equal(o, option);
      });
      if (!dup) options.push_back(std::move(option));
    }
    draft.options = std::move(options);
    out.push_back(std::move(draft));
  }
  return out;
}

ControlWidget widget_from_spec(const WidgetSpec& spec, Origin origin, std::string id) {
  ControlWidget w;
  w.id = std::move(id);
  w.title = trim(spec.label);
  w.value = spec.value;
  for (const auto& option : spec.options) {
    if (is_blank(option)) continue;
    // Preserve the model's order; add_option would reverse it.
    if (!has_option(w, option)) w.options.push_back(trim(option));
  }
  w.zone = Zone::panel;
  w.fresh = true;
  w.origin = origin;
  return w;
}

std::string_view to_string(Zone zone) {
  return zone == Zone::canvas ? "canvas" : "panel";
}

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::suggested: return "suggested";
    case Origin::prompted: return "prompted";
    case Origin::manual: return "manual";
  }
  return "manual";
}

Zone zone_from_string(std::string_view s) {
  if (s == "canvas") return Zone::canvas;
  if (s == "panel") return Zone::panel;
  throw Error(ErrorCode::malformed_request, "unknown zone: " + std::string(s));
}

Origin origin_from_string(std::string_view s) {
  if (s == "suggested") return Origin::suggested;
  if (s == "prompted") return Origin::prompted;
  if (s == "manual") return Origin::manual;
  throw Error(ErrorCode::malformed_request, "unknown origin: " + std::string(s));
}

}  // namespace pc::core
