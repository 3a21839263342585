#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "cmrbench/detail/hash.hpp"
#include "cmrbench/detail/text.hpp"
#include "cmrbench/errors.hpp"
#include "cmrbench/labels.hpp"

namespace cmrbench {

// Output-format directive appended to every diagnostic prompt. Bit-exact and
// golden-tested; changing it changes the template fingerprint.
inline constexpr const char* kFormatDirective =
    "Respond with exactly one JSON object of the form {\"diagnosis\": \"<CODE>\"} "
    "where <CODE> is one of the category codes. Do not output anything else.";

inline constexpr const char* kContextSlot = "{{context}}";
inline constexpr const char* kLabelSlot = "{{labels}}";

// A versioned prompt frame. The frame must contain the context slot exactly
// once; diagnostic templates must also contain the label slot exactly once.
struct PromptTemplate {
  std::string id;
  std::string instruction;
  std::string question;
  std::string frame;

  nlohmann::json to_json() const {
    return {{"id", id},
            {"instruction", instruction},
            {"question", question},
            {"frame", frame}};
  }

  static PromptTemplate from_json(const nlohmann::json& doc) {
    PromptTemplate t;
    t.id = doc.at("id").get<std::string>();
    t.instruction = doc.value("instruction", std::string{});
    t.question = doc.value("question", std::string{});
    t.frame = doc.at("frame").get<std::string>();
    if (t.id.empty()) throw TemplateError("template id must be non-empty");
    return t;
  }
};

inline PromptTemplate default_diagnosis_template() {
  PromptTemplate t;
  t.id = "cmr-diagnosis-v1";
  t.instruction =
      "You are an experienced cardiologist reviewing cardiovascular MR imaging "
      "reports.";
  t.question =
      "Select the single diagnostic category that best matches these findings. "
      "The available categories are:";
  t.frame =
      "{{instruction}}\n\nFindings:\n{{context}}\n\n{{question}}\n{{labels}}\n"
      "\n{{format_directive}}\n";
  return t;
}

inline PromptTemplate default_translation_template() {
  PromptTemplate t;
  t.id = "translate-de-en-v1";
  t.instruction =
      "Translate the following clinical text from German to English. Output only "
      "the translation.";
  t.frame = "{{instruction}}\n\n{{context}}\n";
  return t;
}

// Stable content fingerprint recorded in run manifests.
inline std::uint64_t template_fingerprint(const PromptTemplate& t) {
  std::uint64_t h = detail::fnv1a64(t.id);
  h = detail::fnv1a64(t.instruction, h);
  h = detail::fnv1a64(t.question, h);
  h = detail::fnv1a64(t.frame, h);
  return detail::fnv1a64(kFormatDirective, h);
}

inline std::uint64_t label_set_fingerprint(const LabelSet& labels) {
  return detail::fnv1a64(labels.to_json().dump());
}

namespace detail {

inline void require_slot_once(const std::string& frame, std::string_view slot,
                              const std::string& template_id) {
  std::size_t n = count_occurrences(frame, slot);
  if (n != 1)
    throw TemplateError("template " + template_id + ": " + std::string(slot) +
                        " must occur exactly once (found " + std::to_string(n) + ")");
}

inline std::string render_label_lines(const LabelSet& labels) {
  std::string out;
  for (const auto& label : labels.labels()) {
    out += "- " + label.code + ": " + label.display_name + "\n";
  }
  if (!out.empty()) out.pop_back();  // no trailing newline inside the slot
  return out;
}

}  // namespace detail

// Deterministic rendering of the diagnostic prompt: instruction, narrative
// context, question, the label codes with display names in LabelSet order,
// and the JSON output-format directive.
inline std::string build_prompt(const std::string& narrative, const LabelSet& labels,
                                const PromptTemplate& tpl) {
  if (narrative.empty()) throw TemplateError("narrative must be non-empty");
  if (labels.labels().empty()) throw TemplateError("label set must be non-empty");
  detail::require_slot_once(tpl.frame, kContextSlot, tpl.id);
  detail::require_slot_once(tpl.frame, kLabelSlot, tpl.id);

  std::string prompt = tpl.frame;
  prompt = detail::replace_all(std::move(prompt), "{{instruction}}", tpl.instruction);
  prompt = detail::replace_all(std::move(prompt), "{{question}}", tpl.question);
  prompt = detail::replace_all(std::move(prompt), kLabelSlot,
                               detail::render_label_lines(labels));
  prompt = detail::replace_all(std::move(prompt), kContextSlot, narrative);
  prompt = detail::replace_all(std::move(prompt), "{{format_directive}}", kFormatDirective);
  if (prompt.empty()) throw TemplateError("rendered prompt is empty");
  return prompt;
}

// Rendering for label-free templates (translation).
inline std::string render_simple_prompt(const std::string& text, const PromptTemplate& tpl) {
  if (text.empty()) throw TemplateError("context text must be non-empty");
  detail::require_slot_once(tpl.frame, kContextSlot, tpl.id);
  std::string prompt = tpl.frame;
  prompt = detail::replace_all(std::move(prompt), "{{instruction}}", tpl.instruction);
  prompt = detail::replace_all(std::move(prompt), "{{question}}", tpl.question);
  prompt = detail::replace_all(std::move(prompt), kContextSlot, text);
  prompt = detail::replace_all(std::move(prompt), "{{format_directive}}", kFormatDirective);
  return prompt;
}

// Templates addressed by id. Built-ins are always present; templates loaded
// from a directory override them.
class PromptRegistry {
 public:
  PromptRegistry() {
    add(default_diagnosis_template());
    add(default_translation_template());
  }

  void add(PromptTemplate t) { templates_[t.id] = std::move(t); }

  bool has(const std::string& id) const { return templates_.count(id) > 0; }

  const PromptTemplate& get(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw TemplateError("unknown prompt template: " + id);
    return it->second;
  }

  // Loads every *.json document in the directory.
  void load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
      throw ConfigError("template directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file);
      nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
      if (doc.is_discarded())
        throw TemplateError("template file is not valid JSON: " + file.string());
      add(PromptTemplate::from_json(doc));
    }
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : templates_) out.push_back(id);
    return out;
  }

 private:
  std::map<std::string, PromptTemplate> templates_;
};

}  // namespace cmrbench
