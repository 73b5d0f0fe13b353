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

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mdsw {

/// term -> surface forms. A pipeline keyword matches when the term itself or
/// any listed surface occurs in the scanned text; all forms are stored in
/// canonical normalized form.
class KeywordLexicon {
 public:
  static const KeywordLexicon& builtin();
  static KeywordLexicon load_file(const std::string& path);
  static KeywordLexicon parse(std::string_view content, const std::string& origin_label);
  static KeywordLexicon empty() { return KeywordLexicon(); }

  /// Surfaces for a term, not including the term itself; empty if unknown.
  const std::vector<std::string>& surfaces(std::string_view term) const;
  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }
  std::string fingerprint() const;

 private:
  std::map<std::string, std::vector<std::string>> entries_;
  static const std::vector<std::string> kNone;
};

/// surface -> label with priority, for the annotation lexicons. Resolution:
/// longest matching surface, then higher priority, then label order.
class LabelLexicon {
 public:
  struct Entry {
    std::string surface;  // normalized
    std::string label;
    int priority = 0;
  };

  static LabelLexicon parse(std::string_view content, const std::string& origin_label);
  static LabelLexicon load_file(const std::string& path);

  static const LabelLexicon& builtin_technique();
  static const LabelLexicon& builtin_specialty();
  static const LabelLexicon& builtin_function();

  const std::vector<Entry>& entries() const { return entries_; }

  /// Best label for `normalized_text` under the resolution rule; empty when
  /// nothing matches.
  std::string_view best_label(std::string_view normalized_text) const;

  /// All labels whose surfaces occur, deduplicated, resolution-ordered.
  std::vector<std::string_view> matching_labels(std::string_view normalized_text) const;

  std::string fingerprint() const;

 private:
  std::vector<Entry> entries_;
};

}  // namespace mdsw
