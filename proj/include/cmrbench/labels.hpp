#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cmrbench/detail/text.hpp"
#include "cmrbench/errors.hpp"

namespace cmrbench {

// Sentinel label assigned when no diagnosis could be extracted from a model
// response. Never a member of a LabelSet; scored in the "unparsed" column.
inline constexpr const char* kNoneLabel = "NONE";

struct DiagnosisLabel {
  std::string code;
  std::string display_name;

  bool operator==(const DiagnosisLabel&) const = default;
};

// Canonical surface form used for all label matching: trimmed, lower-cased,
// punctuation replaced by spaces, runs of whitespace collapsed.
inline std::string normalize_surface(std::string_view surface) {
  std::string out;
  out.reserve(surface.size());
  bool pending_space = false;
  for (char ch : surface) {
    unsigned char c = static_cast<unsigned char>(ch);
    bool sep = std::isspace(c) || (c < 0x80 && std::ispunct(c));
    if (sep) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

// Ordered set of diagnostic categories plus a synonym table. Ordering is
// stable and defines confusion-matrix row/column order. Display names are
// registered as implicit synonyms of their own code.
class LabelSet {
 public:
  struct Match {
    std::string code;
    bool via_synonym = false;
  };

  LabelSet(std::vector<DiagnosisLabel> labels,
           std::vector<std::pair<std::string, std::string>> synonyms = {})
      : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw ConfigError("label set needs at least 2 labels");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const auto& label = labels_[i];
      if (label.code.empty()) throw ConfigError("label code must be non-empty");
      std::string key = normalize_surface(label.code);
      if (code_index_.count(key))
        throw ConfigError("duplicate label code: " + label.code);
      code_index_[key] = i;
    }
    for (const auto& label : labels_) {
      std::string key = normalize_surface(label.display_name);
      if (!key.empty() && !code_index_.count(key)) synonym_index_.emplace(key, label.code);
    }
    for (auto& [surface, code] : synonyms) {
      if (!contains(code))
        throw ConfigError("synonym \"" + surface + "\" maps to unknown code: " + code);
      synonym_index_[normalize_surface(surface)] = canonical_code(code);
      synonyms_.emplace_back(surface, canonical_code(code));
    }
  }

  const std::vector<DiagnosisLabel>& labels() const { return labels_; }
  const std::vector<std::pair<std::string, std::string>>& synonyms() const {
    return synonyms_;
  }

  std::size_t size() const { return labels_.size(); }

  bool contains(std::string_view code) const {
    return code_index_.count(normalize_surface(code)) > 0;
  }

  // Index of a code in label order; codes compare case-insensitively.
  std::optional<std::size_t> index_of(std::string_view code) const {
    auto it = code_index_.find(normalize_surface(code));
    if (it == code_index_.end()) return std::nullopt;
    return it->second;
  }

  // Canonical spelling of a code as registered in the set.
  std::string canonical_code(std::string_view code) const {
    auto idx = index_of(code);
    if (!idx) throw ConfigError("unknown label code: " + std::string(code));
    return labels_[*idx].code;
  }

  std::vector<std::string> codes() const {
    std::vector<std::string> out;
    out.reserve(labels_.size());
    for (const auto& l : labels_) out.push_back(l.code);
    return out;
  }

  // Exact code match takes precedence over synonym match.
  std::optional<Match> find(std::string_view surface) const {
    std::string key = normalize_surface(surface);
    if (key.empty()) return std::nullopt;
    if (auto it = code_index_.find(key); it != code_index_.end())
      return Match{labels_[it->second].code, false};
    if (auto it = synonym_index_.find(key); it != synonym_index_.end())
      return Match{it->second, true};
    return std::nullopt;
  }

  nlohmann::json to_json() const {
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& l : labels_)
      labels.push_back({{"code", l.code}, {"display_name", l.display_name}});
    nlohmann::json synonyms = nlohmann::json::object();
    for (const auto& [surface, code] : synonyms_) synonyms[surface] = code;
    return {{"labels", labels}, {"synonyms", synonyms}};
  }

  static LabelSet from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("labels") || !doc["labels"].is_array())
      throw ConfigError("label set document must contain a \"labels\" array");
    std::vector<DiagnosisLabel> labels;
    for (const auto& item : doc["labels"]) {
      labels.push_back({item.at("code").get<std::string>(),
                        item.value("display_name", std::string{})});
    }
    std::vector<std::pair<std::string, std::string>> synonyms;
    if (doc.contains("synonyms")) {
      for (const auto& [surface, code] : doc["synonyms"].items())
        synonyms.emplace_back(surface, code.get<std::string>());
    }
    return LabelSet(std::move(labels), std::move(synonyms));
  }

  static LabelSet load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open label set file: " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded())
      throw ConfigError("label set file is not valid JSON: " + path.string());
    return from_json(doc);
  }

 private:
  std::vector<DiagnosisLabel> labels_;
  std::vector<std::pair<std::string, std::string>> synonyms_;
  std::map<std::string, std::size_t> code_index_;
  std::map<std::string, std::string> synonym_index_;
};

// Maps arbitrary surface text (model output, config value) to a label code.
// No-match is a value, not an error.
inline std::optional<std::string> normalize_label(std::string_view surface,
                                                  const LabelSet& labels) {
  auto match = labels.find(surface);
  if (!match) return std::nullopt;
  return match->code;
}

// The seven cohort categories plus OTHER, with the synonym table shipped in
// config/labels_default.json. The two must stay in sync (covered by a test).
inline LabelSet default_label_set() {
  return LabelSet(
      {
          {"HCM", "hypertrophic cardiomyopathy"},
          {"CA", "cardiac amyloidosis"},
          {"CS", "cardiac sarcoidosis"},
          {"MYO", "myocarditis"},
          {"ICM", "ischemic cardiomyopathy"},
          {"DCM", "dilated cardiomyopathy"},
          {"NORMAL", "normal findings"},
          {"OTHER", "other"},
      },
      {
          {"hypertrophic obstructive cardiomyopathy", "HCM"},
          {"hocm", "HCM"},
          {"amyloidosis", "CA"},
          {"sarcoidosis", "CS"},
          {"acute myocarditis", "MYO"},
          {"ischaemic cardiomyopathy", "ICM"},
          {"ischemic heart disease", "ICM"},
          {"dilatative cardiomyopathy", "DCM"},
          {"normal", "NORMAL"},
          {"normal cardiac findings", "NORMAL"},
          {"no pathological findings", "NORMAL"},
          {"unremarkable", "NORMAL"},
      });
}

}  // namespace cmrbench
