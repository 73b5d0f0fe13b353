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
#include <string_view>

#include "mdsw/lexicon.hpp"
#include "mdsw/record.hpp"
#include "mdsw/regnum.hpp"
#include "mdsw/rules.hpp"

namespace mdsw {

// Reference evaluation of a pipeline spec: per-record recursion with plain
// substring scans, no compiled matcher, no shared state with RulePipeline.
// verify compares this route against the compiled one record by record.

/// Stage membership bits for one record (bit i = stage i of the spec).
std::uint32_t naive_stage_bits(const PipelineSpec& spec, const KeywordLexicon& lexicon,
                               const RecordView& record,
                               const RegnumTable& regnums = RegnumTable::builtin());

/// Plain substring check used by the naive route (std::string_view::find).
bool naive_contains(std::string_view haystack, std::string_view needle);

}  // namespace mdsw
