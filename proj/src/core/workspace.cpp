#include "pc/core/workspace.hpp"

#include "pc/core/text.hpp"
#include "pc/error.hpp"

#include <algorithm>

namespace pc::core {

ControlWidget* find_widget(Workspace& ws, std::string_view widget_id) noexcept {
  auto it = std::find_if(ws.widgets.begin(), ws.widgets.end(),
                         [&](const ControlWidget& w) { return w.id == widget_id; });
  return it == ws.widgets.end() ? nullptr : &*it;
}

const ControlWidget* find_widget(const Workspace& ws, std::string_view widget_id) noexcept {
  return find_widget(const_cast<Workspace&>(ws), widget_id);
}

ControlWidget& widget_at(Workspace& ws, std::string_view widget_id) {
  if (auto* w = find_widget(ws, widget_id)) return *w;
  throw Error(ErrorCode::unknown_widget, "no widget " + std::string(widget_id),
              {{"widget_id", widget_id}});
}

const ControlWidget& widget_at(const Workspace& ws, std::string_view widget_id) {
  return widget_at(const_cast<Workspace&>(ws), widget_id);
}

Workspace move_widget(Workspace ws, std::string_view widget_id, Zone target_zone,
                      std::optional<Vec2> position) {
  auto& w = widget_at(ws, widget_id);
  w.zone = target_zone;
  if (target_zone == Zone::canvas) {
    w.position = position.value_or(w.position.value_or(Vec2{}));
    w.fresh = false;
  } else {
    w.position.reset();
  }
  return ws;
}

Workspace acknowledge_widget(Workspace ws, std::string_view widget_id) {
  widget_at(ws, widget_id).fresh = false;
  return ws;
}

Workspace remove_widget(Workspace ws, std::string_view widget_id) {
  widget_at(ws, widget_id);
  std::erase_if(ws.widgets, [&](const ControlWidget& w) { return w.id == widget_id; });
  return ws;
}

std::vector<LabelValue> active_pairs(const Workspace& ws) {
  std::vector<LabelValue> out;
  for (const auto& w : ws.widgets) {
    if (w.zone != Zone::canvas) continue;
    const auto title = trim_view(w.title);
    const auto value = trim_view(w.value);
    if (title.empty() || value.empty()) continue;
    out.emplace_back(std::string(title), std::string(value));
  }
  return out;
}

std::vector<std::string> widget_labels(const Workspace& ws) {
  std::vector<std::string> out;
  out.reserve(ws.widgets.size());
  for (const auto& w : ws.widgets) out.push_back(w.title);
  return out;
}

}  // namespace pc::core
