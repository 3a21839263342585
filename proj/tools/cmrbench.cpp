// cmrbench: classify CMR report narratives with locally served language
// models and benchmark any number of them against ground-truth labels.
//
// Subcommands mirror the pipeline stages (split, translate, classify) plus
// the composite `run`, corpus tooling (gen-corpus, validate), and `report`.
// Diagnostics go to stderr; stdout carries machine-readable data only.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cmrbench/cmrbench.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // validation or transport failure
constexpr int kExitUsage = 2;

using nlohmann::json;

struct FlagValues {
  std::string config_path;
  std::string corpus;
  std::string models;
  std::string endpoint;
  std::string out;
  std::string translation_model;
  std::string template_id;
  std::string template_dir;
  std::string labels;
  std::string mock_profile;
  std::string averaging;
  std::uint64_t seed = 0;
  double timeout_secs = 120.0;
  int max_retries = 2;
  bool translate = false;
  bool mock = false;
  bool parallel_models = false;
  bool include_quantitative = false;
};

bool passed(const CLI::App* cmd, const std::string& flag) {
  const CLI::Option* opt = cmd->get_option_no_throw(flag);
  return opt != nullptr && opt->count() > 0;
}

void add_config_flag(CLI::App* cmd, FlagValues& v) {
  cmd->add_option("--config", v.config_path, "JSON config file mirroring the run config");
}

void add_backend_flags(CLI::App* cmd, FlagValues& v) {
  cmd->add_option("--endpoint", v.endpoint, "Ollama-compatible endpoint URL");
  cmd->add_option("--timeout-secs", v.timeout_secs, "Per-request timeout");
  cmd->add_option("--max-retries", v.max_retries, "Retries after transport failure");
  cmd->add_flag("--mock", v.mock, "Use the deterministic mock backend");
  cmd->add_option("--mock-profile", v.mock_profile, "Mock answer-table JSON file");
}

void add_pipeline_flags(CLI::App* cmd, FlagValues& v) {
  cmd->add_option("--labels", v.labels, "Label set JSON file");
  cmd->add_option("--template", v.template_id, "Prompt template id");
  cmd->add_option("--template-dir", v.template_dir, "Directory of template JSON files");
  cmd->add_flag("--translate", v.translate, "Translate non-English narratives");
  cmd->add_option("--translation-model", v.translation_model,
                  "Model used for translation");
  cmd->add_flag("--include-quantitative", v.include_quantitative,
                "Prepend the quantitative section to the prompt context");
}

// Only flags the user actually passed enter this layer, keeping precedence
// flag > HARNESS_ENDPOINT > config file > default.
json flags_to_layer(const CLI::App* cmd, const FlagValues& v) {
  json layer = json::object();
  if (passed(cmd, "--corpus")) layer["corpus"] = v.corpus;
  if (passed(cmd, "--models")) layer["models"] = v.models;
  if (passed(cmd, "--endpoint")) layer["endpoint"] = v.endpoint;
  if (passed(cmd, "--out")) layer["out"] = v.out;
  if (passed(cmd, "--labels")) layer["labels"] = v.labels;
  if (passed(cmd, "--template")) layer["template"] = v.template_id;
  if (passed(cmd, "--template-dir")) layer["template_dir"] = v.template_dir;
  if (passed(cmd, "--translate")) layer["translate"] = v.translate;
  if (passed(cmd, "--translation-model")) layer["translation_model"] = v.translation_model;
  if (passed(cmd, "--seed")) layer["seed"] = v.seed;
  if (passed(cmd, "--timeout-secs")) layer["timeout_secs"] = v.timeout_secs;
  if (passed(cmd, "--max-retries")) layer["max_retries"] = v.max_retries;
  if (passed(cmd, "--mock")) layer["mock"] = v.mock;
  if (passed(cmd, "--mock-profile")) layer["mock_profile"] = v.mock_profile;
  if (passed(cmd, "--parallel-models")) layer["parallel_models"] = v.parallel_models;
  if (passed(cmd, "--include-quantitative"))
    layer["include_quantitative"] = v.include_quantitative;
  if (passed(cmd, "--averaging")) layer["averaging"] = v.averaging;
  return layer;
}

cmrbench::RunConfig resolve_config(const CLI::App* cmd, const FlagValues& v) {
  json config_layer;
  if (!v.config_path.empty()) config_layer = cmrbench::load_config_file(v.config_path);
  std::map<std::string, std::string> env;
  if (const char* endpoint = std::getenv("HARNESS_ENDPOINT"))
    env["HARNESS_ENDPOINT"] = endpoint;
  return cmrbench::resolve_run_config(config_layer, env, flags_to_layer(cmd, v));
}

// Writes JSONL either to the given file or to stdout.
class LineSink {
 public:
  explicit LineSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::trunc);
      if (!file_) throw cmrbench::Error("cannot write " + path);
    }
  }
  void write(const json& j) { stream() << j.dump() << "\n"; }

 private:
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  std::ofstream file_;
};

int cmd_gen_corpus(const CLI::App* cmd, const FlagValues& v, const std::string& counts_arg,
                   const std::string& language, double noise_rate) {
  cmrbench::RunConfig config = resolve_config(cmd, v);
  cmrbench::LabelSet labels = config.resolve_label_set();

  cmrbench::CorpusSpec spec;
  spec.language = language;
  spec.seed = v.seed;
  spec.noise_rate = noise_rate;
  for (const auto& part : cmrbench::detail::split(counts_arg, ',')) {
    auto eq = part.find('=');
    if (eq == std::string::npos)
      throw cmrbench::ConfigError("counts must look like CODE=N, got: " + part);
    spec.class_counts.emplace_back(part.substr(0, eq), std::stoi(part.substr(eq + 1)));
  }

  auto reports = cmrbench::generate_synthetic_corpus(spec, labels);
  cmrbench::save_corpus(v.out, reports);
  std::cerr << "wrote " << reports.size() << " reports to " << v.out << "\n";
  return kExitOk;
}

int cmd_validate(const CLI::App* cmd, const FlagValues& v) {
  cmrbench::RunConfig config = resolve_config(cmd, v);
  cmrbench::LabelSet labels = config.resolve_label_set();
  std::vector<cmrbench::ClinicalReport> reports;
  try {
    reports = cmrbench::load_corpus(config.corpus_path, &labels);
  } catch (const cmrbench::CorpusFormatError& e) {
    std::cerr << "corpus format error: " << e.what() << "\n";
    return kExitFailure;
  }
  auto validation = cmrbench::validate_corpus(reports, labels);

  json per_label = json::object();
  for (const auto& [code, count] : validation.per_label) per_label[code] = count;
  json out = {{"total", validation.total},
              {"per_label", per_label},
              {"unlabeled", validation.unlabeled},
              {"duplicate_ids", validation.duplicate_ids},
              {"problems", validation.problems},
              {"warnings", validation.warnings},
              {"passed", validation.passed()}};
  std::cout << out.dump(2) << "\n";
  for (const auto& warning : validation.warnings) std::cerr << "warning: " << warning << "\n";
  for (const auto& problem : validation.problems) std::cerr << "problem: " << problem << "\n";
  return validation.passed() ? kExitOk : kExitFailure;
}

int cmd_split(const CLI::App* cmd, const FlagValues& v) {
  cmrbench::RunConfig config = resolve_config(cmd, v);
  cmrbench::LabelSet labels = config.resolve_label_set();
  auto reports = cmrbench::load_corpus(config.corpus_path, &labels);
  LineSink sink(passed(cmd, "--out") ? v.out : "");

  int failures = 0;
  for (const auto& report : reports) {
    try {
      auto sections = cmrbench::split_report(report.raw_text, config.split);
      sink.write({{"id", report.id},
                  {"detected_language", cmrbench::detect_language(sections.narrative)},
                  {"quantitative", sections.quantitative},
                  {"narrative", sections.narrative},
                  {"split_marker", sections.split_marker}});
    } catch (const cmrbench::UnsplittableError& e) {
      std::cerr << "report " << report.id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? kExitOk : kExitFailure;
}

int cmd_translate(const CLI::App* cmd, const FlagValues& v) {
  cmrbench::RunConfig config = resolve_config(cmd, v);
  cmrbench::LabelSet labels = config.resolve_label_set();
  auto reports = cmrbench::load_corpus(config.corpus_path, &labels);
  auto backend = cmrbench::make_backend(config);

  auto health = backend->health_check(config.translation_model);
  if (!health.healthy) {
    std::cerr << "backend unhealthy for translation model " << config.translation_model
              << ": " << health.reason << "\n";
    return kExitFailure;
  }

  cmrbench::PromptRegistry registry;
  if (!config.template_dir.empty()) registry.load_dir(config.template_dir);
  const auto& tpl = registry.get("translate-de-en-v1");

  LineSink sink(passed(cmd, "--out") ? v.out : "");
  int failures = 0;
  for (const auto& report : reports) {
    auto sections = cmrbench::split_report(report.raw_text, config.split);
    std::string lang = report.language;
    if (lang != "de" && lang != "en") lang = cmrbench::detect_language(sections.narrative);
    try {
      auto outcome = cmrbench::translate_narrative(sections.narrative, lang, *backend,
                                                   config.translation_model, tpl,
                                                   config.timeout_secs);
      sink.write({{"id", report.id},
                  {"skipped", outcome.skipped},
                  {"text", outcome.text},
                  {"model_ref", outcome.model_ref ? json(*outcome.model_ref) : json()},
                  {"latency_secs", outcome.latency_secs}});
    } catch (const cmrbench::Error& e) {
      std::cerr << "report " << report.id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? kExitOk : kExitFailure;
}

int cmd_classify(const CLI::App* cmd, const FlagValues& v) {
  cmrbench::RunConfig config = resolve_config(cmd, v);
  if (config.model_refs.empty()) throw CLI::ValidationError("--models", "is required");
  cmrbench::LabelSet labels = config.resolve_label_set();
  auto reports = cmrbench::load_corpus(config.corpus_path, &labels);
  auto backend = cmrbench::make_backend(config);

  cmrbench::PromptRegistry registry;
  if (!config.template_dir.empty()) registry.load_dir(config.template_dir);
  const auto& tpl = registry.get(config.prompt_template_id);

  for (const auto& model : config.model_refs) {
    auto health = backend->health_check(model);
    if (!health.healthy) {
      std::cerr << "backend unhealthy for model " << model << ": " << health.reason << "\n";
      return kExitFailure;
    }
  }

  // Shared preprocessing, then strictly serialized classification per model.
  for (auto& report : reports) {
    report.sections = cmrbench::split_report(report.raw_text, config.split);
    std::string lang = report.language;
    if (lang != "de" && lang != "en")
      lang = cmrbench::detect_language(report.sections->narrative);
    if (config.translate && lang != "en") {
      auto outcome = cmrbench::translate_narrative(
          report.sections->narrative, lang, *backend, config.translation_model,
          registry.get("translate-de-en-v1"), config.timeout_secs);
      report.sections->narrative = outcome.text;
    }
  }

  cmrbench::ClassifyOptions options;
  options.include_quantitative = config.include_quantitative;
  options.timeout_secs = config.timeout_secs;

  LineSink sink(passed(cmd, "--out") ? v.out : "");
  int failures = 0;
  for (const auto& model : config.model_refs) {
    for (const auto& report : reports) {
      try {
        auto prediction =
            cmrbench::classify_report(report, *backend, model, labels, tpl, options);
        sink.write(json(prediction));
      } catch (const cmrbench::TransportError& e) {
        std::cerr << model << "/" << report.id << ": " << e.what() << "\n";
        ++failures;
      }
    }
  }
  return failures == 0 ? kExitOk : kExitFailure;
}

int cmd_run(const CLI::App* cmd, const FlagValues& v) {
  cmrbench::RunConfig config = resolve_config(cmd, v);
  cmrbench::RunResult result = cmrbench::run_pipeline(config);

  std::cerr << "run complete: " << result.outcomes.size() << " model(s), artifacts in "
            << config.output_dir << "\n";
  for (const auto& ref : result.ranking) std::cerr << "  ranked: " << ref << "\n";
  if (result.had_transport_failures) {
    std::cerr << "transport failures occurred; see manifest warnings\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_report(const std::string& results_dir, const std::string& format) {
  namespace fs = std::filesystem;
  json summary = json::parse(cmrbench::read_file(fs::path(results_dir) / "summary.json"));
  json timing = json::object();
  if (fs::exists(fs::path(results_dir) / "timing.json"))
    timing = json::parse(cmrbench::read_file(fs::path(results_dir) / "timing.json"));

  if (format == "json") {
    json out = summary;
    out["timing"] = timing;
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }

  std::vector<cmrbench::ModelOutcome> outcomes;
  std::vector<std::string> ranking = summary.at("ranking").get<std::vector<std::string>>();
  for (const auto& ref : ranking) {
    cmrbench::ModelOutcome outcome;
    outcome.metrics = summary.at("models").at(ref).get<cmrbench::MetricsSummary>();
    if (timing.contains("models") && timing["models"].contains(ref))
      outcome.timing = timing["models"][ref].get<cmrbench::TimingStats>();
    outcomes.push_back(std::move(outcome));
  }

  if (format == "md") {
    std::cout << cmrbench::render_ranking_md(outcomes, ranking);
  } else if (format == "csv") {
    std::cout << cmrbench::render_metrics_csv(outcomes);
  } else {
    throw CLI::ValidationError("--format", "must be json, md, or csv");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local CMR-report diagnosis benchmark harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cmrbench::kToolVersion);

  FlagValues v;

  auto* gen = app.add_subcommand("gen-corpus", "Generate a seeded synthetic corpus");
  std::string counts = "HCM=15,CA=14,CS=14,MYO=14,ICM=17,DCM=16,NORMAL=19";
  std::string language = "de";
  double noise_rate = 0.0;
  add_config_flag(gen, v);
  gen->add_option("--out", v.out, "Output corpus JSONL")->required();
  gen->add_option("--counts", counts, "Class counts, e.g. HCM=15,CA=14");
  gen->add_option("--language", language, "Corpus language: de, en, or mixed");
  gen->add_option("--seed", v.seed, "Generation seed");
  gen->add_option("--noise-rate", noise_rate, "Fraction with distractor phrasing");
  gen->add_option("--labels", v.labels, "Label set JSON file");

  auto* validate = app.add_subcommand("validate", "Validate a corpus file");
  add_config_flag(validate, v);
  validate->add_option("--corpus", v.corpus, "Corpus JSONL file")->required();
  validate->add_option("--labels", v.labels, "Label set JSON file");

  auto* split = app.add_subcommand("split", "Split reports into sections");
  add_config_flag(split, v);
  split->add_option("--corpus", v.corpus, "Corpus JSONL")->required();
  split->add_option("--out", v.out, "Output JSONL (stdout if omitted)");

  auto* translate = app.add_subcommand("translate", "Translate narrative sections");
  add_config_flag(translate, v);
  translate->add_option("--corpus", v.corpus, "Corpus JSONL")->required();
  add_backend_flags(translate, v);
  translate->add_option("--translation-model", v.translation_model,
                        "Model used for translation");
  translate->add_option("--out", v.out, "Output JSONL (stdout if omitted)");

  auto* classify = app.add_subcommand("classify", "Classify narratives with models");
  add_config_flag(classify, v);
  classify->add_option("--corpus", v.corpus, "Corpus JSONL")->required();
  classify->add_option("--models", v.models, "Comma-separated model list");
  add_backend_flags(classify, v);
  add_pipeline_flags(classify, v);
  classify->add_option("--out", v.out, "Output JSONL (stdout if omitted)");

  auto* run = app.add_subcommand("run", "Run the full benchmark pipeline");
  add_config_flag(run, v);
  run->add_option("--corpus", v.corpus, "Corpus JSONL file");
  run->add_option("--models", v.models, "Comma-separated model list");
  run->add_option("--out", v.out, "Output directory");
  run->add_option("--seed", v.seed, "Run seed (recorded in manifest)");
  run->add_flag("--parallel-models", v.parallel_models, "Evaluate models concurrently");
  run->add_option("--averaging", v.averaging, "Metric averaging: macro or micro");
  add_backend_flags(run, v);
  add_pipeline_flags(run, v);

  auto* report = app.add_subcommand("report", "Render results from a run directory");
  std::string results_dir;
  std::string format = "md";
  report->add_option("--results", results_dir, "Run output directory")->required();
  report->add_option("--format", format, "Output format: json, md, or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message to stderr
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_corpus(gen, v, counts, language, noise_rate);
    if (validate->parsed()) return cmd_validate(validate, v);
    if (split->parsed()) return cmd_split(split, v);
    if (translate->parsed()) return cmd_translate(translate, v);
    if (classify->parsed()) return cmd_classify(classify, v);
    if (run->parsed()) return cmd_run(run, v);
    if (report->parsed()) return cmd_report(results_dir, format);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cmrbench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cmrbench::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
