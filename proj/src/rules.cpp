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

#include "mdsw/rules.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mdsw/builtin_assets.hpp"
#include "mdsw/ingest.hpp"
#include "mdsw/text.hpp"

namespace mdsw {

using ordered_json = nlohmann::ordered_json;

// ------------------------------------------------------------------ spec

std::string RuleSpec::describe() const {
  switch (kind) {
    case Kind::KeywordAny: {
      std::string s = "keyword_any(";
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) s += ",";
        s += text_field_name(fields[i]);
      }
      s += ";";
      for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) s += "|";
        s += terms[i];
      }
      return s + ")";
    }
    case Kind::CodePrefix: return "code_prefix(" + prefix.to_string() + ")";
    case Kind::RegCategoryIs: return "reg_category_is(" + std::to_string(category) + ")";
    case Kind::StageRef: return "stage(" + stage + ")";
    case Kind::Not: return "not(" + children[0].describe() + ")";
    case Kind::And:
    case Kind::Or: {
      std::string s = kind == Kind::And ? "and(" : "or(";
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) s += ",";
        s += children[i].describe();
      }
      return s + ")";
    }
  }
  return "?";
}

namespace {

RuleSpec rule_from_json(const ordered_json& j, const std::string& label) {
  if (!j.is_object() || j.size() != 1) {
    fail(Errc::SpecError, label + ": a rule must be an object with exactly one key");
  }
  const std::string& key = j.begin().key();
  const ordered_json& v = j.begin().value();
  RuleSpec rule;
  if (key == "keyword_any") {
    rule.kind = RuleSpec::Kind::KeywordAny;
    if (!v.is_object() || !v.contains("fields") || !v.contains("terms")) {
      fail(Errc::SpecError, label + ": keyword_any needs fields[] and terms[]");
    }
    for (const auto& f : v["fields"]) {
      TextField tf;
      std::string name = f.get<std::string>();
      if (!text_field_from_name(name, tf)) {
        fail(Errc::SpecError, label + ": unknown field '" + name + "'");
      }
      rule.fields.push_back(tf);
    }
    for (const auto& t : v["terms"]) {
      std::string term = text::normalize(text::trim(t.get<std::string>()));
      if (term.empty()) fail(Errc::SpecError, label + ": empty keyword term");
      rule.terms.push_back(std::move(term));
    }
    if (rule.fields.empty()) fail(Errc::SpecError, label + ": keyword_any without fields");
    if (rule.terms.empty()) fail(Errc::SpecError, label + ": keyword_any without terms");
  } else if (key == "code_prefix") {
    rule.kind = RuleSpec::Kind::CodePrefix;
    if (!v.is_array() || v.empty() || v.size() > 3) {
      fail(Errc::SpecError, label + ": code_prefix needs 1-3 segments");
    }
    for (const auto& seg : v) {
      int s = seg.get<int>();
      if (s < 0 || s > 99) fail(Errc::SpecError, label + ": code_prefix segment out of range");
      rule.prefix.segments[rule.prefix.count++] = static_cast<std::uint8_t>(s);
    }
  } else if (key == "reg_category_is") {
    rule.kind = RuleSpec::Kind::RegCategoryIs;
    int c = v.get<int>();
    if (c < 0 || c > 99) fail(Errc::SpecError, label + ": reg_category_is out of range");
    rule.category = static_cast<std::uint8_t>(c);
  } else if (key == "stage") {
    rule.kind = RuleSpec::Kind::StageRef;
    rule.stage = v.get<std::string>();
    if (rule.stage.empty()) fail(Errc::SpecError, label + ": empty stage reference");
  } else if (key == "not") {
    rule.kind = RuleSpec::Kind::Not;
    rule.children.push_back(rule_from_json(v, label));
  } else if (key == "and" || key == "or") {
    rule.kind = key == "and" ? RuleSpec::Kind::And : RuleSpec::Kind::Or;
    if (!v.is_array() || v.empty()) {
      fail(Errc::SpecError, label + ": " + key + " needs a non-empty rule array");
    }
    for (const auto& child : v) rule.children.push_back(rule_from_json(child, label));
  } else {
    fail(Errc::SpecError, label + ": unknown rule kind '" + key + "'");
  }
  return rule;
}

ordered_json rule_to_json(const RuleSpec& rule) {
  ordered_json j;
  switch (rule.kind) {
    case RuleSpec::Kind::KeywordAny: {
      ordered_json body;
      body["fields"] = ordered_json::array();
      for (TextField f : rule.fields) body["fields"].push_back(text_field_name(f));
      body["terms"] = rule.terms;
      j["keyword_any"] = std::move(body);
      break;
    }
    case RuleSpec::Kind::CodePrefix: {
      ordered_json segs = ordered_json::array();
      for (std::uint8_t i = 0; i < rule.prefix.count; ++i) segs.push_back(rule.prefix.segments[i]);
      j["code_prefix"] = std::move(segs);
      break;
    }
    case RuleSpec::Kind::RegCategoryIs:
      j["reg_category_is"] = rule.category;
      break;
    case RuleSpec::Kind::StageRef:
      j["stage"] = rule.stage;
      break;
    case RuleSpec::Kind::Not:
      j["not"] = rule_to_json(rule.children[0]);
      break;
    case RuleSpec::Kind::And:
    case RuleSpec::Kind::Or: {
      ordered_json arr = ordered_json::array();
      for (const auto& c : rule.children) arr.push_back(rule_to_json(c));
      j[rule.kind == RuleSpec::Kind::And ? "and" : "or"] = std::move(arr);
      break;
    }
  }
  return j;
}

}  // namespace

PipelineSpec PipelineSpec::from_json_text(std::string_view json_text,
                                          const std::string& origin_label) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::SpecError, origin_label + ": invalid pipeline JSON: " + e.what());
  }
  PipelineSpec spec;
  spec.name = doc.value("name", "unnamed");
  spec.version = doc.value("version", 1);
  if (!doc.contains("stages") || !doc["stages"].is_array() || doc["stages"].empty()) {
    fail(Errc::SpecError, origin_label + ": pipeline needs a non-empty stages array");
  }
  for (const auto& js : doc["stages"]) {
    StageSpec stage;
    if (!js.contains("name") || !js["name"].is_string()) {
      fail(Errc::SpecError, origin_label + ": stage without a name");
    }
    stage.name = js["name"].get<std::string>();
    stage.source = js.value("source", "ALL");
    if (!js.contains("include")) {
      fail(Errc::SpecError, origin_label + ": stage '" + stage.name + "' has no include rule");
    }
    stage.include = rule_from_json(js["include"], origin_label);
    if (js.contains("exclude")) stage.exclude = rule_from_json(js["exclude"], origin_label);
    spec.stages.push_back(std::move(stage));
  }
  return spec;
}

PipelineSpec PipelineSpec::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open pipeline spec: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), path);
}

const PipelineSpec& PipelineSpec::builtin_paper() {
  static const PipelineSpec spec =
      PipelineSpec::from_json_text(builtin_assets::kPaperPipelineJson, "builtin paper pipeline");
  return spec;
}

std::string PipelineSpec::to_json_text() const {
  ordered_json doc;
  doc["name"] = name;
  doc["version"] = version;
  doc["stages"] = ordered_json::array();
  for (const auto& s : stages) {
    ordered_json js;
    js["name"] = s.name;
    js["source"] = s.source;
    js["include"] = rule_to_json(s.include);
    if (s.exclude) js["exclude"] = rule_to_json(*s.exclude);
    doc["stages"].push_back(std::move(js));
  }
  return doc.dump(2);
}

std::string PipelineSpec::fingerprint() const { return text::fnv1a64_hex(to_json_text()); }

// -------------------------------------------------------------- compile

struct PipelineCompiler {
  RulePipeline& p;
  const KeywordLexicon& lexicon;
  std::map<std::string, std::uint32_t> surface_index;

  void compile_rule(RuleSpec& rule, std::size_t stage_idx) {
    switch (rule.kind) {
      case RuleSpec::Kind::KeywordAny: {
        rule.kw_index = static_cast<std::int32_t>(p.keyword_rule_count_++);
        std::uint8_t field_mask = 0;
        for (TextField f : rule.fields) field_mask |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(f));
        p.fields_used_mask_ |= field_mask;
        RulePipeline::SlotRange range;
        range.begin = static_cast<std::uint32_t>(p.slots_.size());
        for (const std::string& term : rule.terms) {
          RulePipeline::CompiledTerm ct;
          ct.keyword_rule = static_cast<std::uint32_t>(rule.kw_index);
          ct.term = term;
          ct.fields = rule.fields;
          ct.surfaces.push_back(term);
          for (const std::string& s : lexicon.surfaces(term)) {
            if (std::find(ct.surfaces.begin(), ct.surfaces.end(), s) == ct.surfaces.end()) {
              ct.surfaces.push_back(s);
            }
          }
          std::uint32_t term_index = static_cast<std::uint32_t>(p.terms_.size());
          for (const std::string& surf : ct.surfaces) {
            auto [it, fresh] = surface_index.try_emplace(
                surf, static_cast<std::uint32_t>(p.surfaces_.size()));
            if (fresh) p.surfaces_.push_back({surf, {}});
            std::uint32_t slot_id = static_cast<std::uint32_t>(p.slots_.size());
            p.slots_.push_back({static_cast<std::uint32_t>(rule.kw_index), term_index,
                                it->second, field_mask});
            p.surfaces_[it->second].slots.push_back(slot_id);
          }
          p.terms_.push_back(std::move(ct));
        }
        range.end = static_cast<std::uint32_t>(p.slots_.size());
        p.kw_slot_ranges_.push_back(range);
        break;
      }
      case RuleSpec::Kind::StageRef: {
        int idx = -1;
        for (std::size_t i = 0; i < stage_idx; ++i) {
          if (p.spec_.stages[i].name == rule.stage) {
            idx = static_cast<int>(i);
            break;
          }
        }
        if (idx < 0) {
          fail(Errc::SpecError, "stage '" + p.spec_.stages[stage_idx].name +
                                    "' references stage '" + rule.stage +
                                    "' which is not defined earlier (cyclic or unknown)");
        }
        rule.stage_index = idx;
        break;
      }
      case RuleSpec::Kind::Not:
      case RuleSpec::Kind::And:
      case RuleSpec::Kind::Or:
        for (auto& c : rule.children) compile_rule(c, stage_idx);
        break;
      case RuleSpec::Kind::CodePrefix:
        if (rule.prefix.count == 0) fail(Errc::SpecError, "code_prefix without segments");
        break;
      case RuleSpec::Kind::RegCategoryIs:
        break;
    }
  }

  void run() {
    if (p.spec_.stages.empty()) fail(Errc::SpecError, "pipeline has no stages");
    if (p.spec_.stages.size() > 32) fail(Errc::SpecError, "more than 32 stages unsupported");
    for (std::size_t i = 0; i < p.spec_.stages.size(); ++i) {
      const std::string& name = p.spec_.stages[i].name;
      if (name.empty() || name == "ALL") fail(Errc::SpecError, "bad stage name");
      for (std::size_t j = 0; j < i; ++j) {
        if (p.spec_.stages[j].name == name) {
          fail(Errc::SpecError, "duplicate stage name '" + name + "'");
        }
      }
    }
    for (std::size_t i = 0; i < p.spec_.stages.size(); ++i) {
      StageSpec& stage = p.spec_.stages[i];
      RulePipeline::CompiledStage cs;
      if (stage.source != "ALL") {
        int idx = -1;
        for (std::size_t j = 0; j < i; ++j) {
          if (p.spec_.stages[j].name == stage.source) {
            idx = static_cast<int>(j);
            break;
          }
        }
        if (idx < 0) {
          fail(Errc::SpecError, "stage '" + stage.name + "' sources '" + stage.source +
                                    "' which is not defined earlier (cyclic or unknown)");
        }
        cs.source_index = idx;
      }
      p.stages_.push_back(cs);
      compile_rule(stage.include, i);
      if (stage.exclude) compile_rule(*stage.exclude, i);
    }
    for (const auto& [surf, idx] : surface_index) {
      p.matcher_.add_pattern(surf, idx);
    }
    p.matcher_.build();
  }
};

RulePipeline RulePipeline::compile(const PipelineSpec& spec, const KeywordLexicon& lexicon,
                                   const RegnumTable& regnums) {
  RulePipeline p;
  p.spec_ = spec;
  p.regnums_ = &regnums;
  PipelineCompiler compiler{p, lexicon, {}};
  compiler.run();
  return p;
}

int RulePipeline::stage_index(std::string_view name) const {
  for (std::size_t i = 0; i < spec_.stages.size(); ++i) {
    if (spec_.stages[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

inline bool test_bit(const std::vector<std::uint64_t>& bits, std::uint32_t i) {
  return (bits[i >> 6] >> (i & 63)) & 1;
}

inline void set_bit(std::vector<std::uint64_t>& bits, std::uint32_t i) {
  bits[i >> 6] |= 1ull << (i & 63);
}

}  // namespace

bool RulePipeline::eval_rule(const RuleSpec& rule, const RecordView& record, EvalScratch& scratch,
                             std::uint32_t stage_bits) const {
  switch (rule.kind) {
    case RuleSpec::Kind::KeywordAny:
      return test_bit(scratch.kw_bits, static_cast<std::uint32_t>(rule.kw_index));
    case RuleSpec::Kind::CodePrefix: {
      if (!scratch.code_parsed) {
        scratch.code = parse_classification_code(record.classification_code_raw);
        scratch.code_parsed = true;
      }
      if (!scratch.code.ok()) return false;
      const ClassificationCode& c = scratch.code.value;
      if (c.count < rule.prefix.count) return false;
      for (std::uint8_t i = 0; i < rule.prefix.count; ++i) {
        if (c.segments[i] != rule.prefix.segments[i]) return false;
      }
      return true;
    }
    case RuleSpec::Kind::RegCategoryIs: {
      if (!scratch.regnum_parsed) {
        scratch.regnum = parse_registration_number(record.registration_number_raw, *regnums_);
        scratch.regnum_parsed = true;
      }
      return scratch.regnum.ok() && scratch.regnum.value.category == rule.category;
    }
    case RuleSpec::Kind::StageRef:
      return (stage_bits >> rule.stage_index) & 1;
    case RuleSpec::Kind::Not:
      return !eval_rule(rule.children[0], record, scratch, stage_bits);
    case RuleSpec::Kind::And:
      for (const auto& c : rule.children) {
        if (!eval_rule(c, record, scratch, stage_bits)) return false;
      }
      return true;
    case RuleSpec::Kind::Or:
      for (const auto& c : rule.children) {
        if (eval_rule(c, record, scratch, stage_bits)) return true;
      }
      return false;
  }
  return false;
}

void RulePipeline::collect_provenance(const RuleSpec& rule, const RecordView& record,
                                      EvalScratch& scratch, std::uint32_t stage_bits,
                                      std::vector<ProvenanceItem>& out) const {
  switch (rule.kind) {
    case RuleSpec::Kind::KeywordAny: {
      const SlotRange& range = kw_slot_ranges_[static_cast<std::size_t>(rule.kw_index)];
      for (std::uint32_t s = range.begin; s < range.end; ++s) {
        if (!test_bit(scratch.slot_bits, s)) continue;
        const Slot& slot = slots_[s];
        ProvenanceItem item;
        item.kind = ProvenanceItem::Kind::Term;
        item.field = static_cast<TextField>(scratch.slot_witness_field[s]);
        item.term = terms_[slot.term_index].term;
        item.surface = surfaces_[slot.surface_index].textform;
        out.push_back(std::move(item));
      }
      break;
    }
    case RuleSpec::Kind::CodePrefix:
      out.push_back({ProvenanceItem::Kind::CodePrefix, TextField::ProductName,
                     rule.prefix.to_string(), ""});
      break;
    case RuleSpec::Kind::RegCategoryIs:
      out.push_back({ProvenanceItem::Kind::RegCategory, TextField::ProductName,
                     std::to_string(rule.category), ""});
      break;
    case RuleSpec::Kind::StageRef:
      out.push_back({ProvenanceItem::Kind::StageRef, TextField::ProductName, rule.stage, ""});
      break;
    case RuleSpec::Kind::Not:
      out.push_back({ProvenanceItem::Kind::RuleTrue, TextField::ProductName, rule.describe(), ""});
      break;
    case RuleSpec::Kind::And:
      for (const auto& c : rule.children) collect_provenance(c, record, scratch, stage_bits, out);
      break;
    case RuleSpec::Kind::Or:
      for (const auto& c : rule.children) {
        if (eval_rule(c, record, scratch, stage_bits)) {
          collect_provenance(c, record, scratch, stage_bits, out);
        }
      }
      break;
  }
}

std::uint32_t RulePipeline::evaluate(const RecordView& record, EvalScratch& scratch,
                                     std::vector<StageProvenance>* provenance) const {
  const std::size_t slot_words = (slots_.size() + 63) / 64;
  const std::size_t kw_words = (keyword_rule_count_ + 63) / 64;
  if (scratch.slot_bits.size() != slot_words) scratch.slot_bits.assign(slot_words, 0);
  else std::fill(scratch.slot_bits.begin(), scratch.slot_bits.end(), 0);
  if (scratch.kw_bits.size() != kw_words) scratch.kw_bits.assign(kw_words, 0);
  else std::fill(scratch.kw_bits.begin(), scratch.kw_bits.end(), 0);
  if (scratch.slot_witness_field.size() != slots_.size()) {
    scratch.slot_witness_field.resize(slots_.size());
  }
  scratch.code_parsed = false;
  scratch.regnum_parsed = false;

  for (std::size_t f = 0; f < kTextFieldCount; ++f) {
    if (!(fields_used_mask_ & (1u << f))) continue;
    std::string_view text = record.text(static_cast<TextField>(f));
    if (text.empty()) continue;
    matcher_.scan(text, [&](std::uint32_t surface_id) {
      for (std::uint32_t slot_id : surfaces_[surface_id].slots) {
        const Slot& slot = slots_[slot_id];
        if (!(slot.field_mask & (1u << f))) continue;
        if (!test_bit(scratch.slot_bits, slot_id)) {
          set_bit(scratch.slot_bits, slot_id);
          scratch.slot_witness_field[slot_id] = static_cast<std::uint8_t>(f);
          set_bit(scratch.kw_bits, slot.keyword_rule);
        }
      }
    });
  }

  std::uint32_t stage_bits = 0;
  for (std::size_t i = 0; i < spec_.stages.size(); ++i) {
    const StageSpec& stage = spec_.stages[i];
    const CompiledStage& cs = stages_[i];
    if (cs.source_index >= 0 && !((stage_bits >> cs.source_index) & 1)) continue;
    if (!eval_rule(stage.include, record, scratch, stage_bits)) continue;
    if (stage.exclude && eval_rule(*stage.exclude, record, scratch, stage_bits)) continue;
    stage_bits |= 1u << i;
    if (provenance) {
      StageProvenance sp;
      sp.stage_index = static_cast<std::uint32_t>(i);
      if (cs.source_index >= 0) {
        sp.items.push_back({ProvenanceItem::Kind::Source, TextField::ProductName,
                            spec_.stages[static_cast<std::size_t>(cs.source_index)].name, ""});
      }
      collect_provenance(stage.include, record, scratch, stage_bits, sp.items);
      provenance->push_back(std::move(sp));
    }
  }
  return stage_bits;
}

std::string ProvenanceItem::to_string() const {
  switch (kind) {
    case Kind::Term:
      return std::string("term:") + text_field_name(field) + ":" + term + "=" + surface;
    case Kind::CodePrefix: return "code_prefix:" + term;
    case Kind::RegCategory: return "reg_category:" + term;
    case Kind::StageRef: return "stage:" + term;
    case Kind::Source: return "source:" + term;
    case Kind::RuleTrue: return "rule:" + term;
  }
  return "?";
}

// ------------------------------------------------------------ exclusion

ExclusionList ExclusionList::parse(std::string_view content, const std::string& origin_label) {
  ExclusionList list;
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
    std::size_t tab = line.find('\t');
    ExclusionEntry e;
    e.key = text::normalize(text::trim(tab == std::string_view::npos ? line : line.substr(0, tab)));
    e.reason = tab == std::string_view::npos
                   ? ""
                   : std::string(text::trim(line.substr(tab + 1)));
    if (e.key.empty()) {
      fail(Errc::SpecError, origin_label + ": empty exclusion key at row " +
                                std::to_string(line_no));
    }
    for (const auto& prev : list.entries_) {
      if (prev.key == e.key) {
        fail(Errc::SpecError, origin_label + ": duplicate exclusion key '" + e.key + "'");
      }
    }
    list.entries_.push_back(std::move(e));
  }
  return list;
}

ExclusionList ExclusionList::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open exclusion list: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

const ExclusionEntry* ExclusionList::lookup(std::string_view regnum_normalized,
                                            std::string_view record_id) const {
  for (const auto& e : entries_) {
    if (!regnum_normalized.empty() && e.key == regnum_normalized) return &e;
  }
  for (const auto& e : entries_) {
    if (!record_id.empty() && e.key == record_id) return &e;
  }
  return nullptr;
}

std::string ExclusionList::fingerprint() const {
  std::string blob;
  for (const auto& e : entries_) {
    blob += e.key;
    blob.push_back('\x1f');
    blob += e.reason;
    blob.push_back('\x1e');
  }
  return text::fnv1a64_hex(blob);
}

// ------------------------------------------------------------- run (seq)

PipelineRunResult run_pipeline(const RulePipeline& pipeline, DatasetReader& records,
                               bool collect_provenance) {
  PipelineRunResult result;
  for (std::size_t i = 0; i < pipeline.stage_count(); ++i) {
    result.stage_names.push_back(pipeline.stage_name(i));
  }
  result.stage_counts.assign(pipeline.stage_count(), 0);

  RulePipeline::EvalScratch scratch;
  RecordView view;
  std::vector<StageProvenance> prov;
  while (records.next(view)) {
    prov.clear();
    std::uint32_t bits =
        pipeline.evaluate(view, scratch, collect_provenance ? &prov : nullptr);
    if (bits == 0) continue;
    for (std::size_t i = 0; i < pipeline.stage_count(); ++i) {
      if ((bits >> i) & 1) ++result.stage_counts[i];
    }
    MatchResult m;
    m.record_id = std::string(view.record_id);
    m.row_ordinal = view.row_ordinal;
    m.stage_bits = bits;
    m.provenance = std::move(prov);
    prov = {};
    result.members.push_back(std::move(m));
  }
  result.ingest = records.stats();
  return result;
}

}  // namespace mdsw
