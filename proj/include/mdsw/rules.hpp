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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdsw/aho_corasick.hpp"
#include "mdsw/ingest.hpp"
#include "mdsw/lexicon.hpp"
#include "mdsw/record.hpp"
#include "mdsw/regnum.hpp"

namespace mdsw {

// ----------------------------------------------------------------- spec

/// Declarative rule tree, straight from the pipeline spec document.
struct RuleSpec {
  enum class Kind : std::uint8_t {
    KeywordAny,     // any term (or lexicon surface) occurs in any listed field
    CodePrefix,     // classification code starts with the given segments
    RegCategoryIs,  // registration-number category equals
    StageRef,       // membership in an earlier stage
    Not,
    And,
    Or,
  };

  Kind kind = Kind::And;
  std::vector<TextField> fields;      // KeywordAny
  std::vector<std::string> terms;     // KeywordAny, normalized
  ClassificationCode prefix;          // CodePrefix
  std::uint8_t category = 0;          // RegCategoryIs
  std::string stage;                  // StageRef
  std::vector<RuleSpec> children;     // Not (1), And/Or (>=1)

  // filled in by RulePipeline::compile on its private copy
  std::int32_t kw_index = -1;
  std::int32_t stage_index = -1;

  std::string describe() const;
};

struct StageSpec {
  std::string name;
  std::string source = "ALL";  // "ALL" or the name of an earlier stage
  RuleSpec include;
  std::optional<RuleSpec> exclude;
};

struct PipelineSpec {
  std::string name;
  int version = 1;
  std::vector<StageSpec> stages;

  static PipelineSpec from_json_text(std::string_view json_text,
                                     const std::string& origin_label);
  static PipelineSpec load_file(const std::string& path);
  /// The bundled two-layer strategy: samd / simd / mdsw / aimd_candidates.
  static const PipelineSpec& builtin_paper();

  std::string to_json_text() const;
  std::string fingerprint() const;
};

// ------------------------------------------------------------- compiled

/// Why a record belongs to a stage. Re-checking any single item against the
/// record (plus earlier stage bits) reproduces a hit.
struct ProvenanceItem {
  enum class Kind : std::uint8_t {
    Term,         // `surface` found in `field` (for keyword term `term`)
    CodePrefix,   // classification code matched `term`
    RegCategory,  // registration category equals `term`
    StageRef,     // member of earlier stage `term`
    Source,       // stage sourced from `term`
    RuleTrue,     // composite rule `term` held (e.g. a bare Not)
  };
  Kind kind;
  TextField field = TextField::ProductName;
  std::string term;
  std::string surface;

  std::string to_string() const;
  bool operator==(const ProvenanceItem&) const = default;
};

struct StageProvenance {
  std::uint32_t stage_index = 0;
  std::vector<ProvenanceItem> items;
};

struct MatchResult {
  std::string record_id;
  std::uint64_t row_ordinal = 0;
  std::uint32_t stage_bits = 0;
  std::vector<StageProvenance> provenance;  // one entry per member stage
};

/// Compiled form: one automaton over every surface of every keyword rule,
/// scanned once per referenced field per record.
class RulePipeline {
 public:
  /// Validates and compiles. Keyword terms are expanded through the lexicon
  /// (term + its surfaces). Throws Error(SpecError) on unknown fields, empty
  /// term lists, duplicate stages, unknown or non-upstream stage references.
  static RulePipeline compile(const PipelineSpec& spec, const KeywordLexicon& lexicon,
                              const RegnumTable& regnums = RegnumTable::builtin());

  const PipelineSpec& spec() const { return spec_; }
  std::size_t stage_count() const { return spec_.stages.size(); }
  const std::string& stage_name(std::size_t i) const { return spec_.stages[i].name; }
  int stage_index(std::string_view name) const;

  struct EvalScratch {
    std::vector<std::uint64_t> slot_bits;
    std::vector<std::uint8_t> slot_witness_field;
    std::vector<std::uint64_t> kw_bits;
    bool code_parsed = false;
    Parsed<ClassificationCode> code;
    bool regnum_parsed = false;
    Parsed<RegistrationNumber> regnum;
  };

  /// Evaluates all stages for one record; bit i of the result = membership
  /// in stage i. When `provenance` is given it is filled for member stages.
  std::uint32_t evaluate(const RecordView& record, EvalScratch& scratch,
                         std::vector<StageProvenance>* provenance = nullptr) const;

  /// Surfaces compiled per term, for diagnostics and synth collision checks.
  struct CompiledTerm {
    std::uint32_t keyword_rule = 0;  // instance index
    std::string term;
    std::vector<std::string> surfaces;
    std::vector<TextField> fields;
  };
  const std::vector<CompiledTerm>& compiled_terms() const { return terms_; }

  const MultiPatternMatcher& matcher() const { return matcher_; }

 private:
  friend struct PipelineCompiler;

  struct SlotRange {
    std::uint32_t begin = 0, end = 0;
  };

  struct Surface {
    std::string textform;
    std::vector<std::uint32_t> slots;
  };

  struct Slot {
    std::uint32_t keyword_rule;
    std::uint32_t term_index;     // into terms_
    std::uint32_t surface_index;  // into surfaces_
    std::uint8_t field_mask;      // fields where this slot is active
  };

  struct CompiledStage {
    int source_index = -1;  // -1 = ALL
  };

  bool eval_rule(const RuleSpec& rule, const RecordView& record, EvalScratch& scratch,
                 std::uint32_t stage_bits) const;
  void collect_provenance(const RuleSpec& rule, const RecordView& record, EvalScratch& scratch,
                          std::uint32_t stage_bits, std::vector<ProvenanceItem>& out) const;

  PipelineSpec spec_;
  const RegnumTable* regnums_ = nullptr;
  MultiPatternMatcher matcher_;
  std::vector<Surface> surfaces_;
  std::vector<Slot> slots_;
  std::vector<CompiledTerm> terms_;
  std::vector<SlotRange> kw_slot_ranges_;   // per keyword-rule instance
  std::vector<CompiledStage> stages_;
  std::uint8_t fields_used_mask_ = 0;
  std::uint32_t keyword_rule_count_ = 0;
};

// ------------------------------------------------------------ exclusion

struct ExclusionEntry {
  std::string key;     // registration number (normalized) or record id
  std::string reason;
};

class ExclusionList {
 public:
  static ExclusionList parse(std::string_view content, const std::string& origin_label);
  static ExclusionList load_file(const std::string& path);
  static ExclusionList empty() { return ExclusionList(); }

  const std::vector<ExclusionEntry>& entries() const { return entries_; }

  /// Matches the registration number first (the stable regulatory handle),
  /// then the record id.
  const ExclusionEntry* lookup(std::string_view regnum_normalized,
                               std::string_view record_id) const;

  std::string fingerprint() const;

 private:
  std::vector<ExclusionEntry> entries_;
};

struct ExclusionReport {
  struct Removal {
    std::string key;
    std::string reason;
    std::string record_id;
  };
  std::vector<Removal> removals;
  std::vector<ExclusionEntry> stale_entries;  // matched nothing
};

// ------------------------------------------------------------ run (seq)

struct PipelineRunResult {
  std::vector<std::string> stage_names;
  std::vector<std::uint64_t> stage_counts;
  std::vector<MatchResult> members;  // records in >= 1 stage, in row order
  IngestStats ingest;
};

/// Single sequential pass; the reference path for the parallel scanner.
PipelineRunResult run_pipeline(const RulePipeline& pipeline, DatasetReader& records,
                               bool collect_provenance = true);

}  // namespace mdsw
