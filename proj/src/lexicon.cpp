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

#include "mdsw/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mdsw/builtin_assets.hpp"
#include "mdsw/error.hpp"
#include "mdsw/text.hpp"

namespace mdsw {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open lexicon: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename RowFn>
void for_each_tsv_row(std::string_view content, RowFn&& fn) {
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
    fn(line_no, cols);
  }
}

}  // namespace

const std::vector<std::string> KeywordLexicon::kNone;

const KeywordLexicon& KeywordLexicon::builtin() {
  static const KeywordLexicon lex =
      KeywordLexicon::parse(builtin_assets::kKeywordLexiconTsv, "builtin keyword lexicon");
  return lex;
}

KeywordLexicon KeywordLexicon::load_file(const std::string& path) {
  return parse(slurp(path), path);
}

KeywordLexicon KeywordLexicon::parse(std::string_view content, const std::string& origin_label) {
  KeywordLexicon lex;
  for_each_tsv_row(content, [&](std::size_t line_no, const std::vector<std::string_view>& cols) {
    if (cols.size() < 2) {
      fail(Errc::SpecError,
           origin_label + ": row " + std::to_string(line_no) + " needs term<TAB>surface");
    }
    std::string term = text::normalize(cols[0]);
    std::string surface = text::normalize(cols[1]);
    if (term.empty() || surface.empty()) {
      fail(Errc::SpecError, origin_label + ": empty term or surface at row " +
                                std::to_string(line_no));
    }
    auto& list = lex.entries_[term];
    if (std::find(list.begin(), list.end(), surface) == list.end()) list.push_back(surface);
  });
  return lex;
}

const std::vector<std::string>& KeywordLexicon::surfaces(std::string_view term) const {
  auto it = entries_.find(std::string(term));
  return it == entries_.end() ? kNone : it->second;
}

std::string KeywordLexicon::fingerprint() const {
  std::string blob;
  for (const auto& [term, surfaces] : entries_) {
    blob += term;
    blob.push_back('\x1f');
    for (const auto& s : surfaces) {
      blob += s;
      blob.push_back('\x1e');
    }
  }
  return text::fnv1a64_hex(blob);
}

LabelLexicon LabelLexicon::parse(std::string_view content, const std::string& origin_label) {
  LabelLexicon lex;
  for_each_tsv_row(content, [&](std::size_t line_no, const std::vector<std::string_view>& cols) {
    if (cols.size() < 2) {
      fail(Errc::SpecError, origin_label + ": row " + std::to_string(line_no) +
                                " needs surface<TAB>label[<TAB>priority]");
    }
    Entry e;
    e.surface = text::normalize(cols[0]);
    e.label = std::string(cols[1]);
    e.priority = cols.size() > 2 ? std::stoi(std::string(cols[2])) : 0;
    if (e.surface.empty() || e.label.empty()) {
      fail(Errc::SpecError, origin_label + ": empty surface or label at row " +
                                std::to_string(line_no));
    }
    lex.entries_.push_back(std::move(e));
  });
  // equal surface + equal priority but different labels would make
  // resolution ambiguous
  for (std::size_t i = 0; i < lex.entries_.size(); ++i) {
    for (std::size_t j = i + 1; j < lex.entries_.size(); ++j) {
      const auto& a = lex.entries_[i];
      const auto& b = lex.entries_[j];
      if (a.surface == b.surface && a.priority == b.priority && a.label != b.label) {
        fail(Errc::SpecError, origin_label + ": surface '" + a.surface +
                                  "' maps to two labels at equal priority");
      }
    }
  }
  return lex;
}

LabelLexicon LabelLexicon::load_file(const std::string& path) {
  return parse(slurp(path), path);
}

const LabelLexicon& LabelLexicon::builtin_technique() {
  static const LabelLexicon lex =
      LabelLexicon::parse(builtin_assets::kTechniqueLexiconTsv, "builtin technique lexicon");
  return lex;
}

const LabelLexicon& LabelLexicon::builtin_specialty() {
  static const LabelLexicon lex =
      LabelLexicon::parse(builtin_assets::kSpecialtyLexiconTsv, "builtin specialty lexicon");
  return lex;
}

const LabelLexicon& LabelLexicon::builtin_function() {
  static const LabelLexicon lex =
      LabelLexicon::parse(builtin_assets::kFunctionLexiconTsv, "builtin function lexicon");
  return lex;
}

std::string_view LabelLexicon::best_label(std::string_view normalized_text) const {
  const Entry* best = nullptr;
  for (const auto& e : entries_) {
    if (normalized_text.find(e.surface) == std::string_view::npos) continue;
    if (!best || e.surface.size() > best->surface.size() ||
        (e.surface.size() == best->surface.size() &&
         (e.priority > best->priority ||
          (e.priority == best->priority && e.label < best->label)))) {
      best = &e;
    }
  }
  return best ? std::string_view(best->label) : std::string_view();
}

std::vector<std::string_view> LabelLexicon::matching_labels(
    std::string_view normalized_text) const {
  std::vector<const Entry*> hits;
  for (const auto& e : entries_) {
    if (normalized_text.find(e.surface) != std::string_view::npos) hits.push_back(&e);
  }
  std::sort(hits.begin(), hits.end(), [](const Entry* a, const Entry* b) {
    if (a->surface.size() != b->surface.size()) return a->surface.size() > b->surface.size();
    if (a->priority != b->priority) return a->priority > b->priority;
    return a->label < b->label;
  });
  std::vector<std::string_view> labels;
  for (const Entry* e : hits) {
    if (std::find(labels.begin(), labels.end(), std::string_view(e->label)) == labels.end()) {
      labels.push_back(e->label);
    }
  }
  return labels;
}

std::string LabelLexicon::fingerprint() const {
  std::string blob;
  for (const auto& e : entries_) {
    blob += e.surface;
    blob.push_back('\x1f');
    blob += e.label;
    blob.push_back('\x1f');
    blob += std::to_string(e.priority);
    blob.push_back('\x1e');
  }
  return text::fnv1a64_hex(blob);
}

}  // namespace mdsw
