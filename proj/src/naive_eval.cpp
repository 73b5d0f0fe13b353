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

#include "mdsw/naive_eval.hpp"

namespace mdsw {

namespace {

bool naive_rule(const RuleSpec& rule, const PipelineSpec& spec, const KeywordLexicon& lexicon,
                const RecordView& record, std::uint32_t bits, const RegnumTable& regnums) {
  switch (rule.kind) {
    case RuleSpec::Kind::KeywordAny: {
      for (TextField f : rule.fields) {
        std::string_view text = record.text(f);
        if (text.empty()) continue;
        for (const std::string& term : rule.terms) {
          if (naive_contains(text, term)) return true;
          for (const std::string& surface : lexicon.surfaces(term)) {
            if (naive_contains(text, surface)) return true;
          }
        }
      }
      return false;
    }
    case RuleSpec::Kind::CodePrefix: {
      auto code = parse_classification_code(record.classification_code_raw);
      if (!code.ok() || code.value.count < rule.prefix.count) return false;
      for (std::uint8_t i = 0; i < rule.prefix.count; ++i) {
        if (code.value.segments[i] != rule.prefix.segments[i]) return false;
      }
      return true;
    }
    case RuleSpec::Kind::RegCategoryIs: {
      auto reg = parse_registration_number(record.registration_number_raw, regnums);
      return reg.ok() && reg.value.category == rule.category;
    }
    case RuleSpec::Kind::StageRef: {
      for (std::size_t i = 0; i < spec.stages.size(); ++i) {
        if (spec.stages[i].name == rule.stage) return (bits >> i) & 1;
      }
      return false;
    }
    case RuleSpec::Kind::Not:
      return !naive_rule(rule.children[0], spec, lexicon, record, bits, regnums);
    case RuleSpec::Kind::And:
      for (const auto& c : rule.children) {
        if (!naive_rule(c, spec, lexicon, record, bits, regnums)) return false;
      }
      return true;
    case RuleSpec::Kind::Or:
      for (const auto& c : rule.children) {
        if (naive_rule(c, spec, lexicon, record, bits, regnums)) return true;
      }
      return false;
  }
  return false;
}

}  // namespace

bool naive_contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

std::uint32_t naive_stage_bits(const PipelineSpec& spec, const KeywordLexicon& lexicon,
                               const RecordView& record, const RegnumTable& regnums) {
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < spec.stages.size(); ++i) {
    const StageSpec& stage = spec.stages[i];
    if (stage.source != "ALL") {
      bool in_source = false;
      for (std::size_t j = 0; j < i; ++j) {
        if (spec.stages[j].name == stage.source) {
          in_source = (bits >> j) & 1;
          break;
        }
      }
      if (!in_source) continue;
    }
    if (!naive_rule(stage.include, spec, lexicon, record, bits, regnums)) continue;
    if (stage.exclude && naive_rule(*stage.exclude, spec, lexicon, record, bits, regnums)) {
      continue;
    }
    bits |= 1u << i;
  }
  return bits;
}

}  // namespace mdsw
