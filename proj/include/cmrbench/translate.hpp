#pragma once

#include <optional>
#include <string>

#include "cmrbench/backend.hpp"
#include "cmrbench/detail/text.hpp"
#include "cmrbench/errors.hpp"
#include "cmrbench/prompt.hpp"

namespace cmrbench {

struct TranslationOutcome {
  std::string text;
  bool skipped = false;
  std::optional<std::string> model_ref;
  double latency_secs = 0.0;
};

// English input passes through byte-identical with zero model calls; anything
// else issues exactly one generation request with the translation template.
inline TranslationOutcome translate_narrative(const std::string& narrative,
                                              const std::string& detected_lang,
                                              Backend& backend,
                                              const std::string& model_ref,
                                              const PromptTemplate& tpl =
                                                  default_translation_template(),
                                              double timeout_secs = 120.0) {
  if (narrative.empty()) throw Error("narrative must be non-empty");

  if (detected_lang == "en") {
    return TranslationOutcome{narrative, true, std::nullopt, 0.0};
  }

  GenerationRequest request;
  request.model_ref = model_ref;
  request.prompt = render_simple_prompt(narrative, tpl);
  request.timeout_secs = timeout_secs;
  GenerationResult generated = backend.generate(request);

  std::string text{detail::trim(generated.text)};
  if (text.empty())
    throw EmptyTranslationError("translation model " + model_ref +
                                " returned an empty translation");
  return TranslationOutcome{std::move(text), false, model_ref,
                            generated.wall_latency_secs};
}

}  // namespace cmrbench
