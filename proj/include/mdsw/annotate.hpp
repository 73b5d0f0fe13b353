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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdsw/lexicon.hpp"
#include "mdsw/record.hpp"
#include "mdsw/regnum.hpp"
#include "mdsw/rules.hpp"

namespace mdsw {

enum class SoftwareKind : std::uint8_t { SaMD = 0, SiMD = 1 };
enum class Technique : std::uint8_t { DeepLearning = 0, TraditionalAI = 1, NotAI = 2 };
enum class FunctionCategory : std::uint8_t {
  DecisionSupport = 0,
  ImageDataProcessing = 1,
  AnalysisDataMining = 2,
  MedicalAssistant = 3,
  Uncategorized = 4,
};
enum class DecisionSubtype : std::uint8_t {
  AuxDetection = 0,
  AuxDiagnosis = 1,
  ClinicalTriage = 2,
  AuxEvaluation = 3,
  SurgicalPlanning = 4,
};
enum class Pathway : std::uint8_t {
  Standard = 0,
  Innovation = 1,
  Priority = 2,
  Emergency = 3,
  Unknown = 4,
};

const char* software_kind_name(SoftwareKind k);
const char* technique_name(Technique t);
const char* function_category_name(FunctionCategory c);
const char* decision_subtype_name(DecisionSubtype s);
const char* pathway_name(Pathway p);
bool technique_from_name(std::string_view, Technique&);
bool pathway_from_name(std::string_view, Pathway&);
bool function_from_name(std::string_view, FunctionCategory&, std::optional<DecisionSubtype>&);

/// A pipeline survivor with the analytical labels attached.
struct AnnotatedDevice {
  DeviceRecord record;
  std::uint32_t stage_bits = 0;
  std::vector<StageProvenance> provenance;

  SoftwareKind software_kind = SoftwareKind::SiMD;
  bool ai_candidate = false;  // in the candidate stage
  bool ai_flag = false;       // final, after exclusion-list removal
  Technique technique = Technique::NotAI;
  bool technique_defaulted = false;  // AI-final but no technique term matched
  std::string specialty = "Unknown";
  FunctionCategory function_category = FunctionCategory::Uncategorized;
  std::optional<DecisionSubtype> subtype;  // present iff DecisionSupport
  Pathway pathway = Pathway::Unknown;

  Parsed<ClassificationCode> code;
  Parsed<RegistrationNumber> regnum;
  Parsed<OriginInfo> origin;
};

/// DeepLearning when any deep-learning surface occurs in the description;
/// TraditionalAI when only general AI/ML surfaces occur; NotAI otherwise.
Technique classify_technique(std::string_view description, const LabelLexicon& lexicon);

/// Highest-ranked anatomical/disease surface in the generic name (longest
/// match, then priority); "Unknown" when nothing matches.
std::string extract_specialty(std::string_view generic_name, const LabelLexicon& lexicon);

/// Category by fixed precedence DecisionSupport > ImageDataProcessing >
/// AnalysisDataMining > MedicalAssistant; the decision-support subtype by
/// naming-convention term.
std::pair<FunctionCategory, std::optional<DecisionSubtype>> classify_function(
    std::string_view product_name, std::string_view description, const LabelLexicon& lexicon);

struct AnnotationContext {
  const LabelLexicon* technique = &LabelLexicon::builtin_technique();
  const LabelLexicon* specialty = &LabelLexicon::builtin_specialty();
  const LabelLexicon* function = &LabelLexicon::builtin_function();
  const RegnumTable* regnums = &RegnumTable::builtin();
  int samd_stage = -1;
  int simd_stage = -1;
  int aimd_stage = -1;

  /// Resolves the conventional stage names from a pipeline.
  static AnnotationContext for_pipeline(const RulePipeline& pipeline);
};

AnnotatedDevice annotate_device(DeviceRecord record, std::uint32_t stage_bits,
                                std::vector<StageProvenance> provenance, bool excluded,
                                const AnnotationContext& ctx);

/// Sidecar annotations: labels that are not dump columns (pathway) and
/// manual overrides. Rows: key <TAB> field <TAB> value [<TAB> note].
class Sidecar {
 public:
  struct Entry {
    std::string key;  // registration number or record id
    std::string field;
    std::string value;
    std::string note;
  };

  static Sidecar parse(std::string_view content, const std::string& origin_label);
  static Sidecar load_file(const std::string& path);
  static Sidecar empty() { return Sidecar(); }

  const std::vector<Entry>& entries() const { return entries_; }
  std::string fingerprint() const;

 private:
  std::vector<Entry> entries_;
};

struct SidecarOutcome {
  struct Applied {
    std::string key;
    std::string record_id;
    std::string field;
    std::string old_value;
    std::string new_value;
    std::string note;
  };
  std::vector<Applied> applied;
  std::vector<Sidecar::Entry> stale;  // keys that matched no device
};

/// Applies pathway values and label overrides; every change lands in the
/// outcome's audit list. Stale keys are reported, not errors.
SidecarOutcome apply_sidecar(std::vector<AnnotatedDevice>& devices, const Sidecar& sidecar);

/// Both identifiers well-formed but disagreeing on the software category
/// (registration category 21 vs classification code prefix 21).
bool regnum_code_inconsistent(const AnnotatedDevice& d);

}  // namespace mdsw
