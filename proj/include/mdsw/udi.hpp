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

namespace mdsw {

enum class UdiAgency : std::uint8_t { GS1 = 0, MA = 1, AHM = 2, OtherOpaque = 3 };

const char* udi_agency_name(UdiAgency a);

struct UdiDate {
  std::uint16_t year = 0;
  std::uint8_t month = 0;
  std::uint8_t day = 0;  // resolved day; see month_precision flags on the PI
  bool operator==(const UdiDate&) const = default;
};

struct DeviceIdentifier {
  UdiAgency agency = UdiAgency::OtherOpaque;
  std::string part1;      // assigned by the code-issuing agency
  std::string part2;      // assigned by the manufacturer
  std::string canonical;  // part1 + part2
  bool operator==(const DeviceIdentifier&) const = default;
};

struct ProductionIdentifier {
  std::optional<std::string> lot;
  std::optional<std::string> serial;
  std::optional<UdiDate> production_date;
  std::optional<UdiDate> expiry_date;
  // AI dates with day "00" carry month precision only; the day resolves to
  // the last day of the month and the flag records the original form.
  bool production_month_precision = false;
  bool expiry_month_precision = false;

  bool empty() const {
    return !lot && !serial && !production_date && !expiry_date;
  }
  bool operator==(const ProductionIdentifier&) const = default;
};

struct UdiCode {
  DeviceIdentifier di;
  ProductionIdentifier pi;
  bool operator==(const UdiCode&) const = default;
};

/// Agency-specific split rules, editable as data.
class UdiAgencyTable {
 public:
  struct Gs1Row {
    std::string leading;     // GTIN-14 leading digits, empty = default
    std::size_t part1_len;   // total part I length (indicator + prefix)
  };
  struct AgencyRow {
    std::string code_prefix;  // literal DI prefix, e.g. "MA."
    UdiAgency agency;
    char delimiter;
    int delimiters_in_part1;
  };

  static const UdiAgencyTable& builtin();
  static UdiAgencyTable load_file(const std::string& path);
  static UdiAgencyTable parse(std::string_view content, const std::string& origin_label);

  std::size_t gs1_part1_len(std::string_view gtin14) const;
  const AgencyRow* match_agency(std::string_view di) const;

 private:
  std::vector<Gs1Row> gs1_rows_;  // longest leading first
  std::vector<AgencyRow> agency_rows_;
  std::size_t gs1_default_ = 7;
};

/// True iff the last digit is the mod-10 check (weights 3,1 alternating from
/// the right) of the first thirteen. ParseErrc::NotFourteenDigits when the
/// payload is not exactly 14 ASCII digits.
Parsed<bool> validate_gtin14_check(std::string_view payload);

/// Check digit for a 13-digit payload (helper for generators).
char gtin14_check_digit(std::string_view payload13);

/// Parses a UDI: GS1 element strings, either human-readable with
/// parenthesized AIs — (01) DI, (10) lot, (11) production date, (17) expiry,
/// (21) serial — or the machine form with FNC1 as ASCII 29; MA/AHM codes by
/// prefix; anything else becomes an opaque DI.
Parsed<UdiCode> parse_udi(std::string_view raw, const UdiAgencyTable& table);

/// Canonical element-string form; parse(serialize(u)) == u.
std::string serialize_udi(const UdiCode& code);

/// Splits a parsed DI per the agency table. part1 + part2 always
/// reconstructs the canonical DI; OtherOpaque yields an empty part1.
std::pair<std::string, std::string> split_di_parts(const DeviceIdentifier& di,
                                                   const UdiAgencyTable& table);

}  // namespace mdsw
