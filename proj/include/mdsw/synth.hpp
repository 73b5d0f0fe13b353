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
#include <map>
#include <string>

#include "mdsw/lexicon.hpp"
#include "mdsw/rules.hpp"

namespace mdsw {

/// Recipe for a synthetic dump-shaped archive. Row categories:
///   samd     classification code starting 21, no keywords
///   simd_kw  non-21 code plus one SiMD keyword surface
///   ai_kw    an MDSW base (alternating samd / simd) plus one AI surface
///   plain    the remainder, free of keywords and 21-codes
/// Counts are floor(rows * proportion); the remainder is plain.
struct CorpusRecipe {
  std::uint64_t rows = 0;
  double samd = 0;
  double simd_kw = 0;
  double ai_kw = 0;
  std::uint64_t seed = 1;
  int members = 1;
  char delimiter = ',';
  std::string encoding = "utf8";  // utf8 | gbk
  bool deflate = true;

  static CorpusRecipe from_json_text(std::string_view json_text,
                                     const std::string& origin_label);
  static CorpusRecipe load_file(const std::string& path);
};

struct SynthSummary {
  std::uint64_t rows = 0;
  std::map<std::string, std::uint64_t> category_counts;
  /// Ground-truth stage counts implied by construction.
  std::map<std::string, std::uint64_t> expected_stage_counts;
};

/// Writes the archive and its answer key (one line per row:
/// record_id <TAB> comma-joined member stages). The key is derived from the
/// construction itself — injected surfaces plus a term containment map over
/// codepoint-disjoint filler text — not from running either matcher.
/// The pipeline must contain the stages samd, simd and aimd_candidates.
SynthSummary synthesize_corpus(const CorpusRecipe& recipe, const std::string& zip_path,
                               const std::string& key_path,
                               const PipelineSpec& spec = PipelineSpec::builtin_paper(),
                               const KeywordLexicon& lexicon = KeywordLexicon::builtin());

/// Answer key loaded back for verification: record_id -> set of stage names.
std::map<std::string, std::vector<std::string>> load_answer_key(const std::string& path);

}  // namespace mdsw
