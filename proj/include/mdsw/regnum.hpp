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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdsw/error.hpp"
#include "mdsw/record.hpp"

namespace mdsw {

enum class Origin : std::uint8_t { Domestic = 0, Imported = 1, SAR = 2 };

const char* origin_name(Origin o);  // "domestic" / "imported" / "sar"

/// Decoded registration certificate number.
/// Body grammar after the prefix: YYYY C NN SSSS  (year, class digit,
/// two-digit category, serial of four or more digits).
struct RegistrationNumber {
  Origin origin = Origin::Domestic;
  std::string scope;  // issuing scope key: "National" or a province key
  std::uint16_t year = 0;
  DeviceClass device_class = DeviceClass::I;
  std::uint8_t category = 0;
  std::uint32_t serial = 0;
  std::string raw;

  bool operator==(const RegistrationNumber& o) const {
    return origin == o.origin && scope == o.scope && year == o.year &&
           device_class == o.device_class && category == o.category && serial == o.serial;
  }
};

/// Prefix lookup table driving the parser. New certificate prefixes are
/// data additions, not code changes. Each row maps a literal prefix
/// (CJK like 国械注准 or romanized like National) to origin and scope;
/// the canonical row per (origin, scope) is what format() emits.
class RegnumTable {
 public:
  struct Prefix {
    std::string literal;
    Origin origin;
    std::string scope;
    bool canonical;
  };

  static const RegnumTable& builtin();
  /// Loads from a delimited file: literal <TAB> origin <TAB> scope [<TAB> canonical].
  /// Throws Error(SpecError) on malformed rows.
  static RegnumTable load_file(const std::string& path);
  static RegnumTable parse(std::string_view content, const std::string& origin_label);

  const std::vector<Prefix>& prefixes() const { return prefixes_; }

  /// Longest-prefix match against `s`; nullptr when nothing matches.
  const Prefix* match(std::string_view s) const;
  const Prefix* canonical_for(Origin origin, std::string_view scope) const;

 private:
  std::vector<Prefix> prefixes_;  // sorted by descending literal length
};

/// Decodes a certificate number. Accepts an optional trailing 号.
Parsed<RegistrationNumber> parse_registration_number(std::string_view raw,
                                                     const RegnumTable& table);

/// Canonical text form: CJK prefix + YYYY + C + NN + serial (>= 4 digits,
/// zero padded). parse(format(r)) == r for every well-formed r.
std::string format_registration_number(const RegistrationNumber& r, const RegnumTable& table);

/// Province / region reference table (names, license scope keys, GB region
/// codes used in map output).
struct RegionInfo {
  std::string key;         // stable ASCII key, e.g. "Guangdong"
  std::string cjk_name;    // e.g. 广东省
  std::string abbrev;      // license char, e.g. 粤
  std::string code;        // GB/T 2260 province code, e.g. "44"
  std::string short_name;  // e.g. 广东
};

class RegionTable {
 public:
  static const RegionTable& builtin();
  const std::vector<RegionInfo>& regions() const { return regions_; }
  const RegionInfo* by_key(std::string_view key) const;
  /// Finds a region whose CJK name, abbrev or key occurs in `text`.
  const RegionInfo* find_in_text(std::string_view text) const;

 private:
  std::vector<RegionInfo> regions_;
};

/// Result of origin resolution for one record.
struct OriginInfo {
  Origin origin = Origin::Domestic;
  std::string scope;         // issuing scope when known, else region key or ""
  bool from_fallback = false;  // region heuristic used (regnum unparseable)
};

/// Resolves origin from the registration number, falling back to a region
/// text heuristic; ParseErrc::OriginUndetermined when neither source decides.
Parsed<OriginInfo> origin_of(std::string_view registration_number_raw,
                             std::string_view region_raw, const RegnumTable& table);

}  // namespace mdsw
