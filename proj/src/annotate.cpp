// Copyright 2026 the mdsw authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mdsw/annotate.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mdsw/text.hpp"

namespace mdsw {

const char* software_kind_name(SoftwareKind k) {
  return k == SoftwareKind::SaMD ? "SaMD" : "SiMD";
}

const char* technique_name(Technique t) {
  switch (t) {
    case Technique::DeepLearning: return "deep_learning";
    case Technique::TraditionalAI: return "traditional_ai";
    case Technique::NotAI: return "not_ai";
  }
  return "?";
}

const char* function_category_name(FunctionCategory c) {
  switch (c) {
    case FunctionCategory::DecisionSupport: return "decision_support";
    case FunctionCategory::ImageDataProcessing: return "image_data_processing";
    case FunctionCategory::AnalysisDataMining: return "analysis_data_mining";
    case FunctionCategory::MedicalAssistant: return "medical_assistant";
    case FunctionCategory::Uncategorized: return "uncategorized";
  }
  return "?";
}

const char* decision_subtype_name(DecisionSubtype s) {
  switch (s) {
    case DecisionSubtype::AuxDetection: return "aux_detection";
    case DecisionSubtype::AuxDiagnosis: return "aux_diagnosis";
    case DecisionSubtype::ClinicalTriage: return "clinical_triage";
    case DecisionSubtype::AuxEvaluation: return "aux_evaluation";
    case DecisionSubtype::SurgicalPlanning: return "surgical_planning";
  }
  return "?";
}

const char* pathway_name(Pathway p) {
  switch (p) {
    case Pathway::Standard: return "standard";
    case Pathway::Innovation: return "innovation";
    case Pathway::Priority: return "priority";
    case Pathway::Emergency: return "emergency";
    case Pathway::Unknown: return "unknown";
  }
  return "?";
}

bool technique_from_name(std::string_view s, Technique& out) {
  if (s == "deep_learning") out = Technique::DeepLearning;
  else if (s == "traditional_ai") out = Technique::TraditionalAI;
  else if (s == "not_ai") out = Technique::NotAI;
  else return false;
  return true;
}

bool pathway_from_name(std::string_view s, Pathway& out) {
  if (s == "standard") out = Pathway::Standard;
  else if (s == "innovation") out = Pathway::Innovation;
  else if (s == "priority") out = Pathway::Priority;
  else if (s == "emergency") out = Pathway::Emergency;
  else if (s == "unknown") out = Pathway::Unknown;
  else return false;
  return true;
}

bool function_from_name(std::string_view s, FunctionCategory& cat,
                        std::optional<DecisionSubtype>& subtype) {
  subtype.reset();
  std::string_view cat_part = s;
  std::string_view sub_part;
  if (std::size_t slash = s.find('/'); slash != std::string_view::npos) {
    cat_part = s.substr(0, slash);
    sub_part = s.substr(slash + 1);
  }
  if (cat_part == "decision_support") cat = FunctionCategory::DecisionSupport;
  else if (cat_part == "image_data_processing") cat = FunctionCategory::ImageDataProcessing;
  else if (cat_part == "analysis_data_mining") cat = FunctionCategory::AnalysisDataMining;
  else if (cat_part == "medical_assistant") cat = FunctionCategory::MedicalAssistant;
  else if (cat_part == "uncategorized") cat = FunctionCategory::Uncategorized;
  else return false;
  if (cat == FunctionCategory::DecisionSupport) {
    if (sub_part == "aux_detection") subtype = DecisionSubtype::AuxDetection;
    else if (sub_part == "aux_diagnosis") subtype = DecisionSubtype::AuxDiagnosis;
    else if (sub_part == "clinical_triage") subtype = DecisionSubtype::ClinicalTriage;
    else if (sub_part == "aux_evaluation") subtype = DecisionSubtype::AuxEvaluation;
    else if (sub_part == "surgical_planning") subtype = DecisionSubtype::SurgicalPlanning;
    else return false;
  } else if (!sub_part.empty()) {
    return false;
  }
  return true;
}

Technique classify_technique(std::string_view description, const LabelLexicon& lexicon) {
  bool traditional = false;
  for (const auto& e : lexicon.entries()) {
    if (description.find(e.surface) == std::string_view::npos) continue;
    if (e.label == "deep_learning") return Technique::DeepLearning;
    if (e.label == "traditional_ai") traditional = true;
  }
  return traditional ? Technique::TraditionalAI : Technique::NotAI;
}

std::string extract_specialty(std::string_view generic_name, const LabelLexicon& lexicon) {
  std::string_view label = lexicon.best_label(generic_name);
  return label.empty() ? "Unknown" : std::string(label);
}

std::pair<FunctionCategory, std::optional<DecisionSubtype>> classify_function(
    std::string_view product_name, std::string_view description, const LabelLexicon& lexicon) {
  std::string combined;
  combined.reserve(product_name.size() + description.size() + 1);
  combined.append(product_name);
  combined.push_back('\n');  // keeps surfaces from spanning the two fields
  combined.append(description);

  auto labels = lexicon.matching_labels(combined);
  static const FunctionCategory kPrecedence[] = {
      FunctionCategory::DecisionSupport, FunctionCategory::ImageDataProcessing,
      FunctionCategory::AnalysisDataMining, FunctionCategory::MedicalAssistant};
  for (FunctionCategory want : kPrecedence) {
    for (std::string_view label : labels) {
      FunctionCategory cat;
      std::optional<DecisionSubtype> subtype;
      if (!function_from_name(label, cat, subtype)) continue;
      if (cat == want) return {cat, subtype};
    }
  }
  return {FunctionCategory::Uncategorized, std::nullopt};
}

AnnotationContext AnnotationContext::for_pipeline(const RulePipeline& pipeline) {
  AnnotationContext ctx;
  ctx.samd_stage = pipeline.stage_index("samd");
  ctx.simd_stage = pipeline.stage_index("simd");
  ctx.aimd_stage = pipeline.stage_index("aimd_candidates");
  return ctx;
}

AnnotatedDevice annotate_device(DeviceRecord record, std::uint32_t stage_bits,
                                std::vector<StageProvenance> provenance, bool excluded,
                                const AnnotationContext& ctx) {
  AnnotatedDevice d;
  d.stage_bits = stage_bits;
  d.provenance = std::move(provenance);

  d.code = parse_classification_code(record.classification_code_raw);
  d.regnum = parse_registration_number(record.registration_number_raw, *ctx.regnums);
  d.origin = origin_of(record.registration_number_raw, record.region_raw, *ctx.regnums);

  if (ctx.samd_stage >= 0 || ctx.simd_stage >= 0) {
    bool in_samd = ctx.samd_stage >= 0 && ((stage_bits >> ctx.samd_stage) & 1);
    d.software_kind = in_samd ? SoftwareKind::SaMD : SoftwareKind::SiMD;
  } else {
    d.software_kind = d.code.ok() && is_samd_code(d.code.value) ? SoftwareKind::SaMD
                                                                : SoftwareKind::SiMD;
  }

  d.ai_candidate = ctx.aimd_stage >= 0 && ((stage_bits >> ctx.aimd_stage) & 1);
  d.ai_flag = d.ai_candidate && !excluded;

  d.technique = classify_technique(record.description, *ctx.technique);
  if (d.ai_flag && d.technique == Technique::NotAI) {
    // candidate keywords imply AI involvement without naming a deep
    // learning technique
    d.technique = Technique::TraditionalAI;
    d.technique_defaulted = true;
  }
  d.specialty = extract_specialty(record.generic_name, *ctx.specialty);
  auto [cat, subtype] =
      classify_function(record.product_name, record.description, *ctx.function);
  d.function_category = cat;
  d.subtype = subtype;
  d.record = std::move(record);
  return d;
}

Sidecar Sidecar::parse(std::string_view content, const std::string& origin_label) {
  Sidecar sc;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    std::string_view line =
        content.substr(pos, eol == std::string_view::npos ? content.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? content.size() + 1 : eol + 1;
    ++line_no;
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> cols;
    std::size_t c = 0;
    while (true) {
      std::size_t tab = line.find('\t', c);
      cols.push_back(text::trim(
          line.substr(c, tab == std::string_view::npos ? line.size() - c : tab - c)));
      if (tab == std::string_view::npos) break;
      c = tab + 1;
    }
    if (cols.size() < 3) {
      fail(Errc::SpecError, origin_label + ": sidecar row " + std::to_string(line_no) +
                                " needs key<TAB>field<TAB>value");
    }
    Entry e;
    e.key = text::normalize(cols[0]);
    e.field = std::string(cols[1]);
    e.value = std::string(cols[2]);
    e.note = cols.size() > 3 ? std::string(cols[3]) : "";
    static const char* kFields[] = {"pathway", "specialty", "technique", "function_category"};
    if (std::find_if(std::begin(kFields), std::end(kFields), [&](const char* f) {
          return e.field == f;
        }) == std::end(kFields)) {
      fail(Errc::SpecError, origin_label + ": unknown sidecar field '" + e.field +
                                "' at row " + std::to_string(line_no));
    }
    sc.entries_.push_back(std::move(e));
  }
  return sc;
}

Sidecar Sidecar::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open sidecar: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string Sidecar::fingerprint() const {
  std::string blob;
  for (const auto& e : entries_) {
    blob += e.key;
    blob.push_back('\x1f');
    blob += e.field;
    blob.push_back('\x1f');
    blob += e.value;
    blob.push_back('\x1e');
  }
  return text::fnv1a64_hex(blob);
}

SidecarOutcome apply_sidecar(std::vector<AnnotatedDevice>& devices, const Sidecar& sidecar) {
  SidecarOutcome outcome;
  for (const auto& e : sidecar.entries()) {
    bool matched = false;
    for (auto& d : devices) {
      bool key_is_regnum = !d.record.registration_number_raw.empty() &&
                           e.key == d.record.registration_number_raw;
      if (!key_is_regnum && e.key != d.record.record_id) continue;
      matched = true;
      SidecarOutcome::Applied a;
      a.key = e.key;
      a.record_id = d.record.record_id;
      a.field = e.field;
      a.note = e.note;
      if (e.field == "pathway") {
        Pathway p;
        if (!pathway_from_name(e.value, p)) {
          fail(Errc::SpecError, "sidecar: bad pathway value '" + e.value + "'");
        }
        a.old_value = pathway_name(d.pathway);
        d.pathway = p;
        a.new_value = pathway_name(p);
      } else if (e.field == "specialty") {
        a.old_value = d.specialty;
        d.specialty = e.value;
        a.new_value = e.value;
      } else if (e.field == "technique") {
        Technique t;
        if (!technique_from_name(e.value, t)) {
          fail(Errc::SpecError, "sidecar: bad technique value '" + e.value + "'");
        }
        a.old_value = technique_name(d.technique);
        d.technique = t;
        d.technique_defaulted = false;
        a.new_value = technique_name(t);
      } else if (e.field == "function_category") {
        FunctionCategory cat;
        std::optional<DecisionSubtype> subtype;
        if (!function_from_name(e.value, cat, subtype)) {
          fail(Errc::SpecError, "sidecar: bad function value '" + e.value + "'");
        }
        a.old_value = std::string(function_category_name(d.function_category)) +
                      (d.subtype ? "/" + std::string(decision_subtype_name(*d.subtype)) : "");
        d.function_category = cat;
        d.subtype = subtype;
        a.new_value = e.value;
      }
      outcome.applied.push_back(std::move(a));
    }
    if (!matched) outcome.stale.push_back(e);
  }
  return outcome;
}

bool regnum_code_inconsistent(const AnnotatedDevice& d) {
  if (!d.code.ok() || !d.regnum.ok()) return false;
  bool samd_by_code = is_samd_code(d.code.value);
  bool samd_by_category = d.regnum.value.category == 21;
  return samd_by_code != samd_by_category;
}

}  // namespace mdsw
