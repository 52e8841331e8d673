#include "pc/prompt/templates.hpp"

#include "pc/core/text.hpp"
#include "pc/error.hpp"
#include "pc/prompt/fence.hpp"
#include "pc/prompt/schema.hpp"

#include <nlohmann/json.hpp>

namespace pc::prompt {
namespace {

constexpr std::string_view kGenerateWidgetsSystem =
    "You help a writer steer a draft through control widgets. A control widget "
    "names one adjustable attribute of the text (its label), states how that "
    "attribute currently appears in the text (its value), and offers "
    "alternative specifications the writer could switch to (its options).\n"
    "\n"
    "Work through these steps:\n"
    "1. Read the text between the quote fences and analyze it as a whole.\n"
    "2. Extract the attributes a writer could meaningfully change, such as "
    "tone, style, structure, characters, setting, or plot elements.\n"
    "3. Create between one and four distinct widgets for these attributes. "
    "Each widget has a short label, a value that describes the attribute's "
    "current state in the text, and up to three alternative options.\n"
    "4. Never create a widget whose label repeats or closely resembles one of "
    "the existing widget labels.\n"
    "\n"
    "Answer only with the requested JSON structure.";

constexpr std::string_view kGenerateOptionsSystem =
    "You suggest alternative values for one control widget. The widget label "
    "names an attribute of the text; each suggestion is a new specification "
    "of that attribute the writer could apply to the text.\n"
    "\n"
    "Generate exactly two suggestions for modifying the attribute named by the "
    "label. Requirements:\n"
    "- Tone: match the register of the text and phrase each suggestion as a "
    "short, concrete value, not as an instruction or explanation.\n"
    "- Relevance: each suggestion must apply to this attribute in this text.\n"
    "- Creativity: the two suggestions must differ clearly from each other and "
    "from every existing option, and should open new directions.\n"
    "\n"
    "Answer only with the requested JSON structure.";

constexpr std::string_view kExtractValueSystem =
    "You read a text and report the current state of one attribute.\n"
    "\n"
    "Work through these steps:\n"
    "1. Read the text between the quote fences.\n"
    "2. Identify the attribute named by the widget title.\n"
    "3. Describe how that attribute currently appears in the text as a single "
    "control widget option: a short, concrete value such as a writer would "
    "type into the widget.\n"
    "\n"
    "Answer only with the requested JSON structure.";

constexpr std::string_view kApplyWidgetsSystem =
    "You revise a text so that it satisfies a set of control widget "
    "specifications. Each specification is a line of the form `label: value`, "
    "where the label names an attribute of the text and the value states what "
    "that attribute should be.\n"
    "\n"
    "Work through these steps:\n"
    "1. Understand the text: its content, structure, voice, and tone.\n"
    "2. Interpret every specification and decide what it requires of the text.\n"
    "3. Modify the text so that all specifications hold at once.\n"
    "4. Return the complete revised text.\n"
    "\n"
    "The revised text must stay coherent and logical while preserving the "
    "original context, meaning, voice, and tone wherever a specification does "
    "not require a change. Return only the revised text, without quote fences, "
    "headings, or commentary.";

constexpr std::string_view kApplyPromptSystem =
    "You edit a text according to the writer's prompt. Apply the prompt to the "
    "text while preserving its original context and meaning.\n"
    "\n"
    "Guidelines:\n"
    "- Always return the complete modified text, never just a continuation, an "
    "excerpt, or a partial completion. The writer has no chat history; your "
    "answer replaces the text in their editor.\n"
    "- If the text is empty, write a new text that fulfils the prompt.\n"
    "- Return only the text, without quote fences, headings, or commentary.";

std::string json_list(const std::vector<std::string>& items) {
  return nlohmann::json(items).dump();
}

/// Nonblank entries, trimmed, first occurrence kept.
std::vector<std::string> unique_values(const std::vector<std::string>& values) {
  std::vector<std::string> out;
  for (const auto& v : values) {
    if (core::is_blank(v)) continue;
    bool seen = false;
    for (const auto& o : out) seen = seen || core::canonical_equal(o, v);
    if (!seen) out.push_back(core::trim(v));
  }
  return out;
}

FlowRequest make_request(FlowKind flow, std::string_view system, std::string user,
                         const ResponseSchema* schema) {
  FlowRequest r;
  r.flow = flow;
  r.messages = {{Role::system, std::string(system)}, {Role::user, std::move(user)}};
  if (schema) r.response_schema = *schema;
  r.stream = is_streaming_flow(flow);
  r.temperature = kDefaultTemperature;
  return r;
}

}  // namespace

std::string format_specifications(const std::vector<core::LabelValue>& pairs) {
  std::string out;
  for (const auto& [label, value] : pairs) {
    if (!out.empty()) out += '\n';
    out += label;
    out += ": ";
    out += value;
  }
  return out;
}

FlowRequest build_generate_widgets(std::string_view text,
                                   const std::vector<std::string>& existing_labels,
                                   std::optional<std::string_view> guiding_prompt) {
  if (core::is_blank(text)) throw Error(ErrorCode::empty_text, "text is empty");
  std::string user = "Text:\n" + fenced(text) + "\n\nExisting widget labels (already created, do not regenerate): " +
                     json_list(unique_values(existing_labels));
  if (guiding_prompt && !core::is_blank(*guiding_prompt)) {
    user += "\n\nGuiding prompt. It specifies which aspect of the text the new widgets should modify:\n" +
            fenced(*guiding_prompt);
  }
  return make_request(FlowKind::generate_widgets, kGenerateWidgetsSystem, std::move(user),
                      &widgets_schema());
}

FlowRequest build_generate_options(std::string_view widget_title,
                                   const std::vector<std::string>& existing_values,
                                   std::string_view text,
                                   std::optional<std::string_view> guiding_prompt) {
  if (core::is_blank(widget_title)) throw Error(ErrorCode::empty_title, "widget title is empty");
  std::string user = "Widget label:\n" + fenced(widget_title) + "\n\nText to be modified:\n" + fenced(text) +
                     "\n\nNote: the widget already holds these values; do not repeat any of them: " +
                     json_list(unique_values(existing_values));
  if (guiding_prompt && !core::is_blank(*guiding_prompt)) {
    user += "\n\nGuiding prompt. Both suggestions must follow it:\n" + fenced(*guiding_prompt);
  }
  return make_request(FlowKind::generate_options, kGenerateOptionsSystem, std::move(user),
                      &options_schema());
}

FlowRequest build_extract_value(std::string_view widget_title, std::string_view text) {
  if (core::is_blank(widget_title)) throw Error(ErrorCode::empty_title, "widget title is empty");
  if (core::is_blank(text)) throw Error(ErrorCode::empty_text, "text is empty");
  std::string user = "Widget title:\n" + fenced(widget_title) + "\n\nText:\n" + fenced(text);
  return make_request(FlowKind::extract_value, kExtractValueSystem, std::move(user),
                      &extract_schema());
}

FlowRequest build_apply_widgets(std::string_view text, const std::vector<core::LabelValue>& pairs) {
  if (pairs.empty()) throw Error(ErrorCode::no_active_widgets, "no active widgets on the canvas");
  if (core::is_blank(text)) throw Error(ErrorCode::empty_text, "text is empty");
  std::string user = "Text to be rephrased:\n" + fenced(text) + "\n\nSpecifications:\n" +
                     fenced(format_specifications(pairs));
  return make_request(FlowKind::apply_widgets, kApplyWidgetsSystem, std::move(user), nullptr);
}

FlowRequest build_apply_prompt(std::string_view text, std::string_view user_prompt) {
  if (core::is_blank(user_prompt)) throw Error(ErrorCode::empty_prompt, "prompt is empty");
  std::string user = "Prompt:\n" + fenced(user_prompt) + "\n\nText:\n" + fenced(text);
  return make_request(FlowKind::apply_prompt, kApplyPromptSystem, std::move(user), nullptr);
}

}  // namespace pc::prompt
