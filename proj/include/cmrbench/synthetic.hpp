#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cmrbench/detail/hash.hpp"
#include "cmrbench/errors.hpp"
#include "cmrbench/labels.hpp"
#include "cmrbench/types.hpp"

namespace cmrbench {

// Recipe for a seeded synthetic corpus with known ground truth. All phrasing
// is fictional; no real report text is involved.
struct CorpusSpec {
  std::vector<std::pair<std::string, int>> class_counts;  // generation order
  std::string language = "de";  // de | en | mixed
  std::uint64_t seed = 0;
  double noise_rate = 0.0;  // fraction receiving a cross-diagnosis distractor
};

namespace detail {

struct PhraseBank {
  const char* code;
  // Every primary variant contains the class's stable keyword phrase, usable
  // as a mock-profile trigger.
  std::array<const char*, 3> primary_en;
  std::array<const char*, 3> secondary_en;
  std::array<const char*, 3> primary_de;
  std::array<const char*, 3> secondary_de;
  const char* distractor_phrase_en;  // inserted into other classes as noise
  const char* distractor_phrase_de;
  int ef_low, ef_high;    // ejection fraction range for the quantitative block
  int edv_low, edv_high;  // end-diastolic volume range
};

inline const std::vector<PhraseBank>& phrase_banks() {
  static const std::vector<PhraseBank> banks = {
      {"HCM",
       {"The cine images show asymmetric septal hypertrophy with a maximal wall "
        "thickness of 21 mm.",
        "There is asymmetric septal hypertrophy predominantly of the basal segments.",
        "Findings consistent with asymmetric septal hypertrophy and systolic anterior "
        "motion of the mitral valve."},
       {"Patchy midwall fibrosis at the right ventricular insertion points.",
        "Flow acceleration in the left ventricular outflow tract during systole.",
        "Preserved global systolic function with small ventricular volumes."},
       {"Die Cine-Aufnahmen zeigen eine asymmetrische septale Hypertrophie mit einer "
        "maximalen Wanddicke von 21 mm.",
        "Es findet sich eine asymmetrische septale Hypertrophie der basalen Segmente.",
        "Der Befund zeigt eine asymmetrische septale Hypertrophie mit systolischer "
        "Vorwaertsbewegung der Mitralklappe."},
       {"Fleckfoermige mittmyokardiale Fibrose an den rechtsventrikulaeren "
        "Insertionspunkten.",
        "Flussbeschleunigung im linksventrikulaeren Ausflusstrakt.",
        "Erhaltene globale systolische Funktion bei kleinen Ventrikelvolumina."},
       "asymmetric septal hypertrophy", "asymmetrische septale Hypertrophie", 55, 70,
       100, 150},
      {"CA",
       {"Diffuse subendocardial late enhancement with apical sparing.",
        "Global enhancement pattern with apical sparing of longitudinal strain.",
        "Difficult myocardial nulling and apical sparing after contrast."},
       {"Biatrial enlargement with a thickened interatrial septum.",
        "Concentric increase in wall thickness despite low voltage on ECG.",
        "Small circumferential pericardial effusion."},
       {"Diffuses subendokardiales Enhancement mit apikaler Aussparung.",
        "Globales Enhancementmuster mit apikaler Aussparung des longitudinalen Strains.",
        "Erschwerte myokardiale Nullung und apikale Aussparung nach Kontrastmittel."},
       {"Biatriale Dilatation mit verdicktem interatrialem Septum.",
        "Konzentrische Wanddickenzunahme bei niedriger EKG-Voltage.",
        "Geringer zirkulaerer Perikarderguss."},
       "apical sparing", "apikaler Aussparung", 45, 60, 110, 160},
      {"CS",
       {"Patchy midwall and epicardial enhancement with bilateral hilar lymphadenopathy.",
        "Multifocal nodular enhancement sparing the subendocardium, known hilar "
        "lymphadenopathy.",
        "Basal septal thinning with patchy enhancement; hilar lymphadenopathy on prior "
        "imaging."},
       {"Regional wall motion abnormality not following an ischemic distribution.",
        "Focal septal edema on T2-weighted images.",
        "History of granulomatous disease with cardiac involvement suspected."},
       {"Fleckfoermiges mittmyokardiales und epikardiales Enhancement mit bihilaerer "
        "Lymphadenopathie.",
        "Multifokales nodulaeres Enhancement unter Aussparung des Subendokards, "
        "bekannte hilaere Lymphadenopathie.",
        "Basale septale Ausduennung mit fleckigem Enhancement; hilaere Lymphadenopathie "
        "in der Voraufnahme."},
       {"Regionale Wandbewegungsstoerung ohne ischaemietypische Verteilung.",
        "Fokales septales Oedem in den T2-gewichteten Aufnahmen.",
        "Anamnestisch granulomatoese Erkrankung mit Verdacht auf kardiale Beteiligung."},
       "hilar lymphadenopathy", "hilaere Lymphadenopathie", 40, 60, 110, 170},
      {"MYO",
       {"There is subepicardial enhancement of the basal inferolateral wall.",
        "Patchy subepicardial enhancement with matching edema on T2 mapping.",
        "Recent febrile illness with subepicardial enhancement of the lateral wall."},
       {"Elevated native T1 and T2 values in the affected segments.",
        "Mildly reduced ejection fraction with regional hypokinesia.",
        "Small pericardial effusion without hemodynamic relevance."},
       {"Es zeigt sich ein subepikardiales Enhancement der basalen inferolateralen Wand.",
        "Fleckfoermiges subepikardiales Enhancement mit korrespondierendem Oedem im "
        "T2-Mapping.",
        "Kuerzlich fieberhafter Infekt mit subepikardialem Enhancement der lateralen "
        "Wand."},
       {"Erhoehte native T1- und T2-Werte in den betroffenen Segmenten.",
        "Leichtgradig reduzierte Ejektionsfraktion mit regionaler Hypokinesie.",
        "Geringer Perikarderguss ohne haemodynamische Relevanz."},
       "subepicardial enhancement", "subepikardiales Enhancement", 45, 62, 110, 165},
      {"ICM",
       {"Transmural subendocardial scar in the left anterior descending territory.",
        "There is subendocardial scar of the inferior wall consistent with prior "
        "infarction.",
        "Extensive subendocardial scar with matching wall motion abnormality."},
       {"Akinesia of the apical segments.",
        "Thinned inferior wall without contractile reserve.",
        "Reduced ejection fraction with a regional distribution."},
       {"Transmurale subendokardiale Narbe im Versorgungsgebiet des RIVA.",
        "Es zeigt sich eine subendokardiale Narbe der inferioren Wand nach "
        "abgelaufenem Infarkt.",
        "Ausgedehnte subendokardiale Narbe mit korrespondierender "
        "Wandbewegungsstoerung."},
       {"Akinesie der apikalen Segmente.",
        "Ausgeduennte inferiore Wand ohne kontraktile Reserve.",
        "Reduzierte Ejektionsfraktion mit regionaler Verteilung."},
       "subendocardial scar", "subendokardiale Narbe", 25, 45, 150, 220},
      {"DCM",
       {"Severely dilated left ventricle with global hypokinesia.",
        "The study shows a dilated left ventricle and markedly reduced ejection "
        "fraction.",
        "Globally dilated left ventricle with a midwall stria of enhancement."},
       {"Functional mitral regurgitation secondary to annular dilatation.",
        "No regional scar in a coronary distribution.",
        "Markedly elevated end-diastolic volumes."},
       {"Hochgradig dilatierter linker Ventrikel mit globaler Hypokinesie.",
        "Die Untersuchung zeigt einen dilatierten linken Ventrikel mit deutlich "
        "reduzierter Ejektionsfraktion.",
        "Global dilatierter linker Ventrikel mit mittmyokardialem Enhancementband."},
       {"Funktionelle Mitralinsuffizienz bei Anulusdilatation.",
        "Keine regionale Narbe in koronarer Verteilung.",
        "Deutlich erhoehte enddiastolische Volumina."},
       "dilated left ventricle", "dilatierter linker Ventrikel", 15, 35, 220, 320},
      {"NORMAL",
       {"There is no late gadolinium enhancement and normal biventricular volumes.",
        "Normal wall thickness with no late gadolinium enhancement.",
        "Regular systolic function with no late gadolinium enhancement."},
       {"Normal atrial dimensions.", "No pericardial effusion.",
        "Unremarkable flow measurements of the great vessels."},
       {"Es zeigt sich kein Late-Gadolinium-Enhancement bei normalen biventrikulaeren "
        "Volumina.",
        "Normale Wanddicke ohne Late-Gadolinium-Enhancement.",
        "Regelrechte systolische Funktion ohne Late-Gadolinium-Enhancement."},
       {"Normale atriale Dimensionen.", "Kein Perikarderguss.",
        "Unauffaellige Flussmessungen der grossen Gefaesse."},
       "no late gadolinium enhancement", "kein Late-Gadolinium-Enhancement", 55, 70,
       100, 150},
      {"OTHER",
       {"Mixed findings without a clear diagnostic pattern.",
        "Equivocal enhancement without a clear diagnostic pattern.",
        "Borderline measurements without a clear diagnostic pattern; clinical "
        "correlation advised."},
       {"Findings may relate to prior intervention.",
        "Comparison with previous imaging recommended.",
        "Additional laboratory workup suggested."},
       {"Gemischter Befund ohne eindeutiges diagnostisches Muster.",
        "Unklares Enhancement ohne eindeutiges diagnostisches Muster.",
        "Grenzwertige Messwerte ohne eindeutiges diagnostisches Muster; klinische "
        "Korrelation empfohlen."},
       {"Befund moeglicherweise postinterventionell.",
        "Vergleich mit Voraufnahmen empfohlen.",
        "Ergaenzende Labordiagnostik empfohlen."},
       "without a clear diagnostic pattern", "ohne eindeutiges diagnostisches Muster",
       40, 65, 110, 180},
  };
  return banks;
}

inline const PhraseBank* find_bank(const std::string& code) {
  for (const auto& bank : phrase_banks()) {
    if (code == bank.code) return &bank;
  }
  return nullptr;
}

// 53-bit uniform in [0,1); avoids std::uniform_real_distribution, whose
// output is implementation-defined.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

inline int range_draw(std::mt19937_64& rng, int low, int high) {
  return low + static_cast<int>(rng() % static_cast<std::uint64_t>(high - low + 1));
}

}  // namespace detail

// Stable per-class trigger phrase present in every generated narrative of
// that class; mock profiles key on these.
inline std::string synthetic_keyword(const std::string& code, const std::string& language) {
  const auto* bank = detail::find_bank(code);
  if (!bank) throw Error("no synthetic phrases for label code: " + code);
  return language == "de" ? bank->distractor_phrase_de : bank->distractor_phrase_en;
}

// Deterministic function of its spec: same spec, same bytes, on any platform.
// Class counts are emitted exactly; noise adds a cross-diagnosis distractor
// sentence after the base narrative without disturbing ids or base content.
inline std::vector<ClinicalReport> generate_synthetic_corpus(
    const CorpusSpec& spec, const LabelSet& labels = default_label_set()) {
  if (spec.language != "de" && spec.language != "en" && spec.language != "mixed")
    throw ConfigError("corpus language must be de, en, or mixed");
  if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0)
    throw ConfigError("noise_rate must be in [0,1]");

  int total = 0;
  for (const auto& [code, count] : spec.class_counts) {
    if (count < 0) throw ConfigError("negative count for " + code);
    if (!labels.contains(code)) throw Error("unknown code in class_counts: " + code);
    if (!detail::find_bank(labels.canonical_code(code)))
      throw Error("no synthetic phrases for label code: " + code);
    total += count;
  }
  if (total == 0) throw ConfigError("class_counts must contain at least one positive count");

  std::vector<ClinicalReport> reports;
  reports.reserve(static_cast<std::size_t>(total));
  int serial = 0;

  for (const auto& [raw_code, count] : spec.class_counts) {
    std::string code = labels.canonical_code(raw_code);
    const detail::PhraseBank& bank = *detail::find_bank(code);
    std::uint64_t class_stream = detail::splitmix64(spec.seed ^ detail::fnv1a64(code));

    for (int k = 0; k < count; ++k) {
      std::mt19937_64 rng(detail::splitmix64(class_stream + static_cast<std::uint64_t>(k)));
      ++serial;

      bool german;
      if (spec.language == "mixed") {
        german = (rng() % 2) == 0;
      } else {
        german = spec.language == "de";
      }

      int ef = detail::range_draw(rng, bank.ef_low, bank.ef_high);
      int edv = detail::range_draw(rng, bank.edv_low, bank.edv_high);
      int esv = edv * (100 - ef) / 100;
      int mass = detail::range_draw(rng, 90, 180);
      std::size_t primary = rng() % bank.primary_en.size();
      std::size_t secondary = rng() % bank.secondary_en.size();

      // Distractor parameters are always drawn so the base content is
      // independent of noise_rate.
      const auto& banks = detail::phrase_banks();
      std::size_t distractor = rng() % (banks.size() - 1);
      if (banks[distractor].code == code) distractor = banks.size() - 1;
      bool noisy = detail::unit_draw(rng) < spec.noise_rate;

      char quantitative[160];
      if (german) {
        std::snprintf(quantitative, sizeof(quantitative),
                      "LVEF: %d %%\nLVEDV: %d ml\nLVESV: %d ml\nMyokardmasse: %d g",
                      ef, edv, esv, mass);
      } else {
        std::snprintf(quantitative, sizeof(quantitative),
                      "LVEF: %d %%\nLVEDV: %d ml\nLVESV: %d ml\nMyocardial mass: %d g",
                      ef, edv, esv, mass);
      }

      std::string narrative;
      if (german) {
        narrative = std::string(bank.primary_de[primary]) + " " + bank.secondary_de[secondary];
        if (noisy)
          narrative += std::string(" Differentialdiagnostisch ist ein Befund mit ") +
                       banks[distractor].distractor_phrase_de +
                       " nicht sicher auszuschliessen.";
      } else {
        narrative = std::string(bank.primary_en[primary]) + " " + bank.secondary_en[secondary];
        if (noisy)
          narrative += std::string(" A differential with ") +
                       banks[distractor].distractor_phrase_en + " cannot be fully excluded.";
      }

      char id[32];
      std::snprintf(id, sizeof(id), "case-%04d", serial);

      ClinicalReport report;
      report.id = id;
      report.language = german ? "de" : "en";
      report.raw_text = std::string(quantitative) + "\n" +
                        (german ? "Beurteilung:" : "Assessment:") + "\n" + narrative;
      report.ground_truth = code;
      reports.push_back(std::move(report));
    }
  }
  return reports;
}

}  // namespace cmrbench
