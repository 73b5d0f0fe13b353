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

#include <string_view>

namespace mdsw::builtin_assets {

// Byte-for-byte copies of the files under assets/paper_default/, embedded at
// build time so the shared library works without an asset directory. The
// files on disk remain the editable source of truth.

extern const std::string_view kRegnumGrammarTsv;
extern const std::string_view kRegionCodesTsv;
extern const std::string_view kUdiAgenciesTsv;
extern const std::string_view kDefaultSchemaJson;
extern const std::string_view kPaperPipelineJson;
extern const std::string_view kKeywordLexiconTsv;
extern const std::string_view kTechniqueLexiconTsv;
extern const std::string_view kSpecialtyLexiconTsv;
extern const std::string_view kFunctionLexiconTsv;

}  // namespace mdsw::builtin_assets
