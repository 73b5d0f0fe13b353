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

#include "mdsw/regnum.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdsw/builtin_assets.hpp"
#include "mdsw/text.hpp"

namespace mdsw {

const char* origin_name(Origin o) {
  switch (o) {
    case Origin::Domestic: return "domestic";
    case Origin::Imported: return "imported";
    case Origin::SAR: return "sar";
  }
  return "?";
}

namespace {

Origin origin_from_label(std::string_view s, bool& ok) {
  ok = true;
  if (s == "domestic") return Origin::Domestic;
  if (s == "imported") return Origin::Imported;
  if (s == "sar") return Origin::SAR;
  ok = false;
  return Origin::Domestic;
}

bool all_digits(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return !s.empty();
}

std::uint32_t to_u32(std::string_view s) {
  std::uint32_t v = 0;
  for (char c : s) v = v * 10 + static_cast<std::uint32_t>(c - '0');
  return v;
}

}  // namespace

const RegnumTable& RegnumTable::builtin() {
  static const RegnumTable table =
      RegnumTable::parse(builtin_assets::kRegnumGrammarTsv, "builtin regnum grammar");
  return table;
}

RegnumTable RegnumTable::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open grammar table: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

RegnumTable RegnumTable::parse(std::string_view content, const std::string& origin_label) {
  RegnumTable t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    std::string_view line = content.substr(pos, eol == std::string_view::npos ? content.size() - pos
                                                                              : eol - pos);
    pos = eol == std::string_view::npos ? content.size() + 1 : eol + 1;
    ++line_no;
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> cols;
    std::size_t c = 0;
    while (true) {
      std::size_t tab = line.find('\t', c);
      cols.push_back(text::trim(line.substr(c, tab == std::string_view::npos ? line.size() - c
                                                                             : tab - c)));
      if (tab == std::string_view::npos) break;
      c = tab + 1;
    }
    if (cols.size() < 3) {
      fail(Errc::SpecError, origin_label + ": grammar row " + std::to_string(line_no) +
                                " needs literal<TAB>origin<TAB>scope");
    }
    bool ok = false;
    Prefix p;
    p.literal = text::normalize(cols[0]);
    p.origin = origin_from_label(cols[1], ok);
    if (!ok || p.literal.empty()) {
      fail(Errc::SpecError, origin_label + ": bad grammar row " + std::to_string(line_no));
    }
    p.scope = std::string(cols[2]);
    p.canonical = cols.size() > 3 && cols[3] == "canonical";
    t.prefixes_.push_back(std::move(p));
  }
  if (t.prefixes_.empty()) fail(Errc::SpecError, origin_label + ": empty grammar table");
  std::sort(t.prefixes_.begin(), t.prefixes_.end(),
            [](const Prefix& a, const Prefix& b) { return a.literal.size() > b.literal.size(); });
  return t;
}

const RegnumTable::Prefix* RegnumTable::match(std::string_view s) const {
  for (const auto& p : prefixes_) {
    if (s.size() >= p.literal.size() && s.substr(0, p.literal.size()) == p.literal) return &p;
  }
  return nullptr;
}

const RegnumTable::Prefix* RegnumTable::canonical_for(Origin origin,
                                                      std::string_view scope) const {
  const Prefix* any = nullptr;
  for (const auto& p : prefixes_) {
    if (p.origin == origin && p.scope == scope) {
      if (p.canonical) return &p;
      if (!any) any = &p;
    }
  }
  return any;
}

Parsed<RegistrationNumber> parse_registration_number(std::string_view raw,
                                                     const RegnumTable& table) {
  using R = Parsed<RegistrationNumber>;
  std::string norm = text::normalize(text::trim(raw));
  std::string_view s = norm;
  if (s.empty()) return R::failure(ParseErrc::MalformedRegistration);
  // optional trailing 号
  constexpr std::string_view kHao = "\xE5\x8F\xB7";
  if (s.size() >= kHao.size() && s.substr(s.size() - kHao.size()) == kHao) {
    s.remove_suffix(kHao.size());
  }
  const RegnumTable::Prefix* p = table.match(s);
  if (!p) return R::failure(ParseErrc::MalformedRegistration);
  std::string_view body = s.substr(p->literal.size());
  // YYYY C NN SSSS(+): 11 to 15 digits total
  if (body.size() < 11 || body.size() > 15 || !all_digits(body)) {
    return R::failure(ParseErrc::MalformedRegistration);
  }
  RegistrationNumber r;
  r.origin = p->origin;
  r.scope = p->scope;
  r.year = static_cast<std::uint16_t>(to_u32(body.substr(0, 4)));
  if (r.year < 1980 || r.year > 2100) return R::failure(ParseErrc::MalformedRegistration);
  char class_digit = body[4];
  if (class_digit < '1' || class_digit > '3') return R::failure(ParseErrc::UnknownClassDigit);
  r.device_class = static_cast<DeviceClass>(class_digit - '0');
  r.category = static_cast<std::uint8_t>(to_u32(body.substr(5, 2)));
  r.serial = to_u32(body.substr(7));
  r.raw = std::string(text::trim(raw));
  return R::success(std::move(r));
}

std::string format_registration_number(const RegistrationNumber& r, const RegnumTable& table) {
  const RegnumTable::Prefix* p = table.canonical_for(r.origin, r.scope);
  if (!p) fail(Errc::InvalidArgument,
               "no grammar prefix for origin/scope: " + std::string(origin_name(r.origin)) + "/" +
                   r.scope);
  char body[24];
  std::snprintf(body, sizeof(body), "%04u%u%02u%04u", static_cast<unsigned>(r.year),
                static_cast<unsigned>(r.device_class), static_cast<unsigned>(r.category),
                static_cast<unsigned>(r.serial));
  return p->literal + body;
}

const RegionTable& RegionTable::builtin() {
  static const RegionTable table = [] {
    RegionTable t;
    std::string_view content = builtin_assets::kRegionCodesTsv;
    std::size_t pos = 0;
    while (pos <= content.size()) {
      std::size_t eol = content.find('\n', pos);
      std::string_view line =
          content.substr(pos, eol == std::string_view::npos ? content.size() - pos : eol - pos);
      pos = eol == std::string_view::npos ? content.size() + 1 : eol + 1;
      line = text::trim(line);
      if (line.empty() || line.front() == '#') continue;
      RegionInfo info;
      std::vector<std::string_view> cols;
      std::size_t c = 0;
      while (true) {
        std::size_t tab = line.find('\t', c);
        cols.push_back(line.substr(c, tab == std::string_view::npos ? line.size() - c : tab - c));
        if (tab == std::string_view::npos) break;
        c = tab + 1;
      }
      if (cols.size() < 5) continue;
      info.key = std::string(cols[0]);
      info.cjk_name = std::string(cols[1]);
      info.abbrev = std::string(cols[2]);
      info.code = std::string(cols[3]);
      info.short_name = std::string(cols[4]);
      t.regions_.push_back(std::move(info));
    }
    return t;
  }();
  return table;
}

const RegionInfo* RegionTable::by_key(std::string_view key) const {
  for (const auto& r : regions_)
    if (r.key == key) return &r;
  return nullptr;
}

const RegionInfo* RegionTable::find_in_text(std::string_view txt) const {
  if (txt.empty()) return nullptr;
  for (const auto& r : regions_) {
    if (txt.find(r.cjk_name) != std::string_view::npos) return &r;
  }
  for (const auto& r : regions_) {
    if (txt.find(r.short_name) != std::string_view::npos) return &r;
  }
  for (const auto& r : regions_) {
    std::string key_lower = r.key;
    for (char& c : key_lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (txt.find(key_lower) != std::string_view::npos) return &r;
  }
  return nullptr;
}

Parsed<OriginInfo> origin_of(std::string_view registration_number_raw,
                             std::string_view region_raw, const RegnumTable& table) {
  using R = Parsed<OriginInfo>;
  if (!text::trim(registration_number_raw).empty()) {
    auto parsed = parse_registration_number(registration_number_raw, table);
    if (parsed.ok()) {
      OriginInfo info;
      info.origin = parsed.value.origin;
      info.scope = parsed.value.scope;
      info.from_fallback = false;
      return R::success(std::move(info));
    }
  }
  std::string region = text::normalize(text::trim(region_raw));
  if (region.empty()) return R::failure(ParseErrc::OriginUndetermined);

  // SAR markers, CJK and romanized
  static const std::string_view kSarMarkers[] = {
      "\xe9\xa6\x99\xe6\xb8\xaf",          // 香港
      "\xe6\xbe\xb3\xe9\x97\xa8",          // 澳门
      "\xe6\xbe\xb3\xe9\x96\x80",          // 澳門
      "\xe5\x8f\xb0\xe6\xb9\xbe",          // 台湾
      "\xe5\x8f\xb0\xe7\x81\xa3",          // 台灣
      "hong kong", "hongkong", "macau", "macao", "taiwan", "xu"};
  for (std::string_view m : kSarMarkers) {
    if (region.find(m) != std::string::npos) {
      OriginInfo info{Origin::SAR, "Xu", true};
      return R::success(std::move(info));
    }
  }
  if (const RegionInfo* r = RegionTable::builtin().find_in_text(region)) {
    OriginInfo info{Origin::Domestic, r->key, true};
    return R::success(std::move(info));
  }
  // foreign-country markers
  static const std::string_view kForeignMarkers[] = {
      "\xe7\xbe\x8e\xe5\x9b\xbd",          // 美国
      "\xe5\xbe\xb7\xe5\x9b\xbd",          // 德国
      "\xe6\x97\xa5\xe6\x9c\xac",          // 日本
      "\xe8\x8d\xb7\xe5\x85\xb0",          // 荷兰
      "\xe8\x8b\xb1\xe5\x9b\xbd",          // 英国
      "\xe6\xb3\x95\xe5\x9b\xbd",          // 法国
      "\xe9\x9f\xa9\xe5\x9b\xbd",          // 韩国
      "\xe7\x91\x9e\xe5\xa3\xab",          // 瑞士
      "usa", "united states", "germany", "japan",  "netherlands",
      "uk",  "france",        "korea",   "switzerland"};
  for (std::string_view m : kForeignMarkers) {
    if (region.find(m) != std::string::npos) {
      OriginInfo info{Origin::Imported, "", true};
      return R::success(std::move(info));
    }
  }
  return R::failure(ParseErrc::OriginUndetermined);
}

}  // namespace mdsw
