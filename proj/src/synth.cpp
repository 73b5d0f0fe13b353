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

#include "mdsw/synth.hpp"

#include <iconv.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mdsw/csv.hpp"
#include "mdsw/text.hpp"
#include "mdsw/udi.hpp"
#include "mdsw/zip.hpp"

namespace mdsw {

CorpusRecipe CorpusRecipe::from_json_text(std::string_view json_text,
                                          const std::string& origin_label) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::SpecError, origin_label + ": invalid recipe JSON: " + e.what());
  }
  CorpusRecipe r;
  if (!doc.contains("rows")) fail(Errc::SpecError, origin_label + ": recipe needs rows");
  r.rows = doc["rows"].get<std::uint64_t>();
  const nlohmann::json& p = doc.contains("proportions") ? doc["proportions"] : doc;
  r.samd = p.value("samd", 0.0);
  r.simd_kw = p.value("simd_kw", 0.0);
  r.ai_kw = p.value("ai_kw", 0.0);
  if (r.samd < 0 || r.simd_kw < 0 || r.ai_kw < 0 || r.samd + r.simd_kw + r.ai_kw > 1.0) {
    fail(Errc::SpecError, origin_label + ": proportions must be >= 0 and sum to <= 1");
  }
  r.seed = doc.value("seed", 1ull);
  r.members = doc.value("members", 1);
  if (r.members < 1 || r.members > 1000) {
    fail(Errc::SpecError, origin_label + ": members out of range");
  }
  std::string delim = doc.value("delimiter", ",");
  if (delim.size() != 1) fail(Errc::SpecError, origin_label + ": delimiter must be one byte");
  r.delimiter = delim[0];
  r.encoding = doc.value("encoding", "utf8");
  if (r.encoding != "utf8" && r.encoding != "gbk") {
    fail(Errc::SpecError, origin_label + ": encoding must be utf8 or gbk");
  }
  std::string compression = doc.value("compression", "deflate");
  if (compression == "deflate") r.deflate = true;
  else if (compression == "store") r.deflate = false;
  else fail(Errc::SpecError, origin_label + ": compression must be deflate or store");
  return r;
}

CorpusRecipe CorpusRecipe::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open recipe: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), path);
}

namespace {

// Candidate filler codepoints; the generator keeps only those appearing in
// no keyword surface, so filler text can neither contain nor complete a
// term, no matter how tokens abut.
constexpr std::string_view kFillerCandidates =
    "康泰瑞宝华信诚鑫隆飞腾跃顺丰源恒通百千万亿兆微纳克吨升毫厘秒钟表盘管绳带杯盒箱"
    "柜桌椅窗帘墙砖瓦梁柱桥路街巷村镇湖河江洋洲岛峰岭谷坡林森草花果蔬粮盐糖茶酒瓶罐"
    "锅碗瓢勺筷叉锤钉帽衣裤鞋袜巾帕枕席灯烛炉灶金银铜铁锡铝锌镍钙钾钠镁硅磷硫氯碘";

std::vector<std::string> decode_codepoints(std::string_view utf8) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < utf8.size()) {
    unsigned char b = static_cast<unsigned char>(utf8[i]);
    std::size_t len = b < 0x80 ? 1 : (b & 0xE0) == 0xC0 ? 2 : (b & 0xF0) == 0xE0 ? 3 : 4;
    if (i + len > utf8.size()) break;
    out.emplace_back(utf8.substr(i, len));
    i += len;
  }
  return out;
}

struct KeywordNode {
  const RuleSpec* rule;
  std::uint32_t index;
};

void collect_keyword_nodes(const RuleSpec& rule, std::vector<KeywordNode>& out) {
  if (rule.kind == RuleSpec::Kind::KeywordAny) {
    out.push_back({&rule, static_cast<std::uint32_t>(out.size())});
    return;
  }
  for (const auto& c : rule.children) collect_keyword_nodes(c, out);
}

// Construction-time truth for one row: which keyword rules fired (decided by
// injection plus containment), the code segments, the category digits.
struct ConstructedRecord {
  std::vector<bool> kw_fired;
  ClassificationCode code;
  bool code_valid = false;
  std::uint8_t reg_category = 0;
  bool reg_valid = false;
};

// Evaluates the stage algebra over those predetermined primitives. No text
// is scanned here; this is the third, construction-side route.
struct AlgebraEval {
  const PipelineSpec& spec;
  const std::vector<KeywordNode>& kws;

  bool eval(const RuleSpec& rule, const ConstructedRecord& rec, std::uint32_t bits) const {
    switch (rule.kind) {
      case RuleSpec::Kind::KeywordAny: {
        for (const auto& node : kws) {
          if (node.rule == &rule) return rec.kw_fired[node.index];
        }
        fail(Errc::Internal, "keyword node not registered");
      }
      case RuleSpec::Kind::CodePrefix: {
        if (!rec.code_valid || rec.code.count < rule.prefix.count) return false;
        for (std::uint8_t i = 0; i < rule.prefix.count; ++i) {
          if (rec.code.segments[i] != rule.prefix.segments[i]) return false;
        }
        return true;
      }
      case RuleSpec::Kind::RegCategoryIs:
        return rec.reg_valid && rec.reg_category == rule.category;
      case RuleSpec::Kind::StageRef: {
        for (std::size_t i = 0; i < spec.stages.size(); ++i) {
          if (spec.stages[i].name == rule.stage) return (bits >> i) & 1;
        }
        return false;
      }
      case RuleSpec::Kind::Not:
        return !eval(rule.children[0], rec, bits);
      case RuleSpec::Kind::And:
        for (const auto& c : rule.children)
          if (!eval(c, rec, bits)) return false;
        return true;
      case RuleSpec::Kind::Or:
        for (const auto& c : rule.children)
          if (eval(c, rec, bits)) return true;
        return false;
    }
    return false;
  }

  std::uint32_t stage_bits(const ConstructedRecord& rec) const {
    std::uint32_t bits = 0;
    for (std::size_t i = 0; i < spec.stages.size(); ++i) {
      const StageSpec& st = spec.stages[i];
      if (st.source != "ALL") {
        bool in_src = false;
        for (std::size_t j = 0; j < i; ++j) {
          if (spec.stages[j].name == st.source) {
            in_src = (bits >> j) & 1;
            break;
          }
        }
        if (!in_src) continue;
      }
      if (!eval(st.include, rec, bits)) continue;
      if (st.exclude && eval(*st.exclude, rec, bits)) continue;
      bits |= 1u << i;
    }
    return bits;
  }
};

// Re-cases or widens latin letters so ingestion normalization gets real
// work; the normalized form is unchanged.
std::string distort_surface(std::string_view surface, int mode) {
  if (mode == 0) return std::string(surface);
  std::string out;
  for (char raw : surface) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (mode == 1 && c >= 'a' && c <= 'z') {
      out.push_back(static_cast<char>(c - 32));
    } else if (mode == 2 && ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) {
      unsigned cp = 0xFEE0 + c;
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(raw);
    }
  }
  return out;
}

class GbkEncoder {
 public:
  GbkEncoder() {
    cd_ = iconv_open("GBK", "UTF-8");
    if (cd_ == reinterpret_cast<iconv_t>(-1)) {
      fail(Errc::EncodingError, "iconv cannot encode GBK");
    }
  }
  ~GbkEncoder() { iconv_close(cd_); }
  GbkEncoder(const GbkEncoder&) = delete;
  GbkEncoder& operator=(const GbkEncoder&) = delete;

  std::string encode(std::string_view utf8) {
    std::string out;
    out.resize(utf8.size() * 2 + 16);
    char* in_ptr = const_cast<char*>(utf8.data());
    std::size_t in_left = utf8.size();
    char* out_ptr = out.data();
    std::size_t out_left = out.size();
    if (iconv(cd_, &in_ptr, &in_left, &out_ptr, &out_left) == static_cast<std::size_t>(-1)) {
      fail(Errc::EncodingError, "text not representable in GBK");
    }
    out.resize(out.size() - out_left);
    return out;
  }

 private:
  iconv_t cd_;
};

}  // namespace

SynthSummary synthesize_corpus(const CorpusRecipe& recipe, const std::string& zip_path,
                               const std::string& key_path, const PipelineSpec& spec,
                               const KeywordLexicon& lexicon) {
  auto stage_idx = [&](std::string_view name) -> int {
    for (std::size_t i = 0; i < spec.stages.size(); ++i) {
      if (spec.stages[i].name == name) return static_cast<int>(i);
    }
    return -1;
  };
  if (stage_idx("samd") < 0 || stage_idx("simd") < 0 || stage_idx("aimd_candidates") < 0) {
    fail(Errc::SpecError, "corpus synthesis needs stages named samd, simd and aimd_candidates");
  }

  std::vector<KeywordNode> kws;
  for (const auto& st : spec.stages) {
    collect_keyword_nodes(st.include, kws);
    if (st.exclude) collect_keyword_nodes(*st.exclude, kws);
  }
  for (const auto& node : kws) {
    for (TextField f : node.rule->fields) {
      if (f == TextField::Region || f == TextField::Manufacturer) {
        // region holds real province names; its content is not injection-
        // controlled, so ground-truth labels could not be guaranteed
        fail(Errc::SpecError,
             "synthesis supports keyword fields product_name, generic_name and "
             "description only");
      }
    }
  }

  std::set<std::string> alphabet;  // codepoints used by any surface
  auto forms_of = [&](const RuleSpec& kw) {
    std::vector<std::string> forms;
    for (const std::string& t : kw.terms) {
      forms.push_back(t);
      for (const std::string& s : lexicon.surfaces(t)) forms.push_back(s);
    }
    return forms;
  };
  std::vector<std::vector<std::string>> kw_forms;
  kw_forms.reserve(kws.size());
  for (const auto& node : kws) {
    kw_forms.push_back(forms_of(*node.rule));
    for (const auto& f : kw_forms.back()) {
      for (const auto& cp : decode_codepoints(f)) alphabet.insert(cp);
    }
  }
  for (char d : {'0', '1', '2', '3', '4', '5', '6', '7', '8', '9', '-'}) {
    if (alphabet.count(std::string(1, d))) {
      fail(Errc::SpecError, "synthesis requires keyword surfaces free of digits and '-'");
    }
  }

  std::vector<std::string> filler;
  for (const auto& cp : decode_codepoints(kFillerCandidates)) {
    if (!alphabet.count(cp)) filler.push_back(cp);
  }
  if (filler.size() < 24) fail(Errc::SpecError, "filler pool exhausted by keyword surfaces");

  using InjectChoice = std::pair<std::string, std::vector<TextField>>;
  auto stage_kw_surfaces = [&](std::string_view stage_name) {
    std::vector<InjectChoice> pool;
    const StageSpec& st = spec.stages[static_cast<std::size_t>(stage_idx(stage_name))];
    std::vector<KeywordNode> local;
    collect_keyword_nodes(st.include, local);
    for (const auto& node : local) {
      for (const auto& f : forms_of(*node.rule)) pool.emplace_back(f, node.rule->fields);
    }
    if (pool.empty()) {
      fail(Errc::SpecError, "stage '" + std::string(stage_name) +
                                "' has no keyword rule to synthesize from");
    }
    return pool;
  };
  auto simd_pool = stage_kw_surfaces("simd");
  auto ai_pool = stage_kw_surfaces("aimd_candidates");

  auto implied_kws = [&](const std::string& surface, TextField field) {
    std::vector<std::uint32_t> implied;
    for (std::size_t k = 0; k < kws.size(); ++k) {
      bool scans_field = std::find(kws[k].rule->fields.begin(), kws[k].rule->fields.end(),
                                   field) != kws[k].rule->fields.end();
      if (!scans_field) continue;
      for (const auto& form : kw_forms[k]) {
        if (surface.find(form) != std::string::npos) {
          implied.push_back(static_cast<std::uint32_t>(k));
          break;
        }
      }
    }
    return implied;
  };

  const std::uint64_t n = recipe.rows;
  std::uint64_t n_samd = static_cast<std::uint64_t>(static_cast<double>(n) * recipe.samd);
  std::uint64_t n_simd = static_cast<std::uint64_t>(static_cast<double>(n) * recipe.simd_kw);
  std::uint64_t n_ai = static_cast<std::uint64_t>(static_cast<double>(n) * recipe.ai_kw);
  enum Cat : std::uint8_t { kPlain = 0, kSamd = 1, kSimd = 2, kAi = 3 };
  std::vector<std::uint8_t> cats(n, kPlain);
  std::fill_n(cats.begin(), n_samd, static_cast<std::uint8_t>(kSamd));
  std::fill_n(cats.begin() + static_cast<std::ptrdiff_t>(n_samd), n_simd,
              static_cast<std::uint8_t>(kSimd));
  std::fill_n(cats.begin() + static_cast<std::ptrdiff_t>(n_samd + n_simd), n_ai,
              static_cast<std::uint8_t>(kAi));
  std::mt19937_64 rng(recipe.seed);
  std::shuffle(cats.begin(), cats.end(), rng);

  const RegnumTable& regnums = RegnumTable::builtin();
  const RegionTable& regions = RegionTable::builtin();
  static const char* kScopeCycle[] = {"National", "Guangdong", "Hubei",  "Zhejiang", "Tianjin",
                                      "Jiangsu",  "Shanxi",    "Sichuan", "Beijing", "Shanghai"};
  constexpr std::size_t kScopeCount = sizeof(kScopeCycle) / sizeof(kScopeCycle[0]);
  AlgebraEval algebra{spec, kws};

  ZipWriter zip(zip_path);
  std::ofstream key(key_path, std::ios::binary);
  if (!key) fail(Errc::IoError, "cannot create answer key: " + key_path);

  std::optional<GbkEncoder> gbk;
  if (recipe.encoding == "gbk") gbk.emplace();

  static const char* kHeaders[] = {
      "最小销售单元产品标识", "产品名称", "通用名称", "产品描述", "型号规格",
      "注册备案人名称", "注册人所在省份", "分类编码", "注册证编号", "版本号"};

  SynthSummary summary;
  summary.rows = n;
  std::vector<std::uint64_t> stage_totals(spec.stages.size(), 0);
  const char* cat_names[] = {"plain", "samd", "simd_kw", "ai_kw"};
  std::uint64_t cat_counts[4] = {0, 0, 0, 0};

  std::string row_buf, line;
  std::uint64_t ai_ordinal = 0, simd_ordinal = 0;
  auto filler_token = [&](std::uint64_t seed_a, std::uint64_t seed_b, int len) {
    std::string t;
    std::uint64_t h = seed_a * 0x9E3779B97F4A7C15ull + seed_b + recipe.seed;
    for (int i = 0; i < len; ++i) {
      h ^= h >> 33;
      h *= 0xFF51AFD7ED558CCDull;
      t += filler[static_cast<std::size_t>(h % filler.size())];
    }
    return t;
  };

  for (int m = 0; m < recipe.members; ++m) {
    char member_name[32];
    std::snprintf(member_name, sizeof(member_name), "part-%03d.csv", m);
    zip.begin_member(member_name, recipe.deflate, 1);

    std::vector<std::string_view> cells(std::begin(kHeaders), std::end(kHeaders));
    row_buf.clear();
    csv_append_row(row_buf, cells, recipe.delimiter);
    zip.write(gbk ? gbk->encode(row_buf) : row_buf);

    std::uint64_t begin =
        n * static_cast<std::uint64_t>(m) / static_cast<std::uint64_t>(recipe.members);
    std::uint64_t end =
        n * static_cast<std::uint64_t>(m + 1) / static_cast<std::uint64_t>(recipe.members);
    for (std::uint64_t row = begin; row < end; ++row) {
      Cat cat = static_cast<Cat>(cats[row]);
      ++cat_counts[cat];
      ConstructedRecord rec;
      rec.kw_fired.assign(kws.size(), false);

      char di[20];
      std::snprintf(di, sizeof(di), "069%010llu", static_cast<unsigned long long>(row));
      di[13] = gtin14_check_digit(std::string_view(di, 13));
      di[14] = '\0';

      char code_buf[12];
      bool samd_base = cat == kSamd || (cat == kAi && (ai_ordinal % 2 == 0));
      int lead = samd_base ? 21 : static_cast<int>(1 + (row % 67));
      if (!samd_base && lead == 21) lead = 22;
      std::snprintf(code_buf, sizeof(code_buf), "%02d-%02d-%02d", lead,
                    static_cast<int>(row % 18 + 1), static_cast<int>(row % 7 + 1));
      auto parsed_code = parse_classification_code(code_buf);
      rec.code = parsed_code.value;
      rec.code_valid = parsed_code.ok();

      std::string regnum_text;
      bool has_regnum = row % 13 != 5;
      if (has_regnum) {
        RegistrationNumber r;
        if (row % 11 == 3) {
          r.origin = Origin::Imported;
          r.scope = "National";
        } else if (row % 23 == 7) {
          r.origin = Origin::SAR;
          r.scope = "National";
        } else {
          r.origin = Origin::Domestic;
          r.scope = kScopeCycle[row % kScopeCount];
        }
        bool class3 = cat == kAi ? (ai_ordinal % 3 != 2) : (row % 3 == 0);
        r.device_class = class3 ? DeviceClass::III : DeviceClass::II;
        if (r.device_class == DeviceClass::III) r.scope = "National";
        r.year = static_cast<std::uint16_t>(2016 + (row % 9));
        r.category = static_cast<std::uint8_t>(lead);
        r.serial = static_cast<std::uint32_t>(row % 10000000);
        regnum_text = format_registration_number(r, regnums);
        if (row % 7 == 2) {
          const char* roman = r.origin == Origin::Imported ? "Imported"
                              : r.origin == Origin::SAR    ? "Xu"
                              : r.scope == "National"      ? "National"
                                                           : r.scope.c_str();
          char body[24];
          std::snprintf(body, sizeof(body), "%04u%u%02u%04u", static_cast<unsigned>(r.year),
                        static_cast<unsigned>(r.device_class),
                        static_cast<unsigned>(r.category), static_cast<unsigned>(r.serial));
          regnum_text = std::string(roman) + body;
        }
        rec.reg_valid = true;
        rec.reg_category = r.category;
      }

      std::string region_text;
      if (row % 9 != 4) {
        const RegionInfo* ri = regions.by_key(kScopeCycle[row % kScopeCount]);
        if (ri) region_text = ri->cjk_name;
      }

      std::string name_text = filler_token(row, 1, 3);
      std::string generic_text = filler_token(row, 2, 3);
      std::string desc_text = filler_token(row, 3, 4);
      auto inject = [&](const InjectChoice& choice, std::uint64_t ordinal) {
        TextField field = choice.second[ordinal % choice.second.size()];
        std::string surface = distort_surface(choice.first, static_cast<int>(ordinal % 3));
        std::string* target = field == TextField::ProductName   ? &name_text
                              : field == TextField::GenericName ? &generic_text
                                                                : &desc_text;
        *target += surface;
        *target += filler_token(row, 7 + ordinal % 13, 2);
        for (std::uint32_t k : implied_kws(choice.first, field)) rec.kw_fired[k] = true;
      };
      if (cat == kSimd || (cat == kAi && !samd_base)) {
        inject(simd_pool[simd_ordinal % simd_pool.size()], simd_ordinal);
        ++simd_ordinal;
      }
      if (cat == kAi) {
        inject(ai_pool[ai_ordinal % ai_pool.size()], ai_ordinal);
        ++ai_ordinal;
      }
      if (row % 19 == 11) {
        desc_text += std::string(1, recipe.delimiter) + filler_token(row, 9, 2);
      }
      if (row % 31 == 17 && !gbk) desc_text += "\n" + filler_token(row, 10, 2);

      std::string manufacturer = filler_token(row / 16, 11, 4);
      char model[24], version[16];
      std::snprintf(model, sizeof(model), "XJ-%llu",
                    static_cast<unsigned long long>(row % 5000));
      std::snprintf(version, sizeof(version), "V1.%llu",
                    static_cast<unsigned long long>(row % 10));

      cells = {std::string_view(di),    name_text,    generic_text,
               desc_text,               std::string_view(model), manufacturer,
               region_text,             std::string_view(code_buf), regnum_text,
               std::string_view(version)};
      row_buf.clear();
      csv_append_row(row_buf, cells, recipe.delimiter);
      zip.write(gbk ? gbk->encode(row_buf) : row_buf);

      std::uint32_t bits = algebra.stage_bits(rec);
      line.clear();
      line += di;
      line.push_back('\t');
      bool first = true;
      for (std::size_t i = 0; i < spec.stages.size(); ++i) {
        if ((bits >> i) & 1) {
          if (!first) line.push_back(',');
          line += spec.stages[i].name;
          first = false;
          ++stage_totals[i];
        }
      }
      line.push_back('\n');
      key.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
    zip.end_member();
  }
  zip.finish();
  key.flush();
  if (!key) fail(Errc::IoError, "write failed: " + key_path);

  for (int c = 0; c < 4; ++c) summary.category_counts[cat_names[c]] = cat_counts[c];
  for (std::size_t i = 0; i < spec.stages.size(); ++i) {
    summary.expected_stage_counts[spec.stages[i].name] = stage_totals[i];
  }
  return summary;
}

std::map<std::string, std::vector<std::string>> load_answer_key(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open answer key: " + path);
  std::map<std::string, std::vector<std::string>> key;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    std::string id = line.substr(0, tab);
    std::vector<std::string> stages;
    if (tab != std::string::npos) {
      std::string rest = line.substr(tab + 1);
      std::size_t pos = 0;
      while (!rest.empty()) {
        std::size_t comma = rest.find(',', pos);
        std::string s =
            rest.substr(pos, comma == std::string::npos ? rest.size() - pos : comma - pos);
        if (!s.empty()) stages.push_back(s);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
    key.emplace(std::move(id), std::move(stages));
  }
  return key;
}

}  // namespace mdsw
