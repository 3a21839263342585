#pragma once

#include <optional>
#include <string>

#include "cmrbench/backend.hpp"
#include "cmrbench/errors.hpp"
#include "cmrbench/extract.hpp"
#include "cmrbench/labels.hpp"
#include "cmrbench/prompt.hpp"
#include "cmrbench/types.hpp"

namespace cmrbench {

struct ClassifyOptions {
  bool include_quantitative = false;  // ablation only; narrative-only by default
  double temperature = 0.0;
  std::optional<int> max_tokens;
  double timeout_secs = 120.0;
};

// Builds the prompt, issues exactly one generation call, and extracts the
// label. Parse failures yield a NONE prediction and never throw; transport
// errors propagate after the client's retries.
inline Prediction classify_report(const ClinicalReport& report, Backend& backend,
                                  const std::string& model_ref, const LabelSet& labels,
                                  const PromptTemplate& tpl,
                                  const ClassifyOptions& options = {}) {
  if (!report.sections)
    throw Error("report " + report.id + " has no sections; split it first");

  std::string context = report.sections->narrative;
  if (options.include_quantitative && !report.sections->quantitative.empty())
    context = report.sections->quantitative + "\n" + context;

  GenerationRequest request;
  request.model_ref = model_ref;
  request.prompt = build_prompt(context, labels, tpl);
  request.temperature = options.temperature;
  request.max_tokens = options.max_tokens;
  request.timeout_secs = options.timeout_secs;

  GenerationResult generated = backend.generate(request);
  Extraction extraction = parse_prediction(generated.text, labels);

  Prediction prediction;
  prediction.report_id = report.id;
  prediction.model_ref = model_ref;
  prediction.label = extraction.label;
  prediction.raw_response = generated.text;
  prediction.parse_status = extraction.status;
  prediction.latency_secs = generated.wall_latency_secs;
  return prediction;
}

}  // namespace cmrbench
