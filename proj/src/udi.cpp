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

#include "mdsw/udi.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdsw/builtin_assets.hpp"
#include "mdsw/text.hpp"

namespace mdsw {

namespace {

constexpr char kFnc1 = '\x1d';

bool all_digits(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return !s.empty();
}

std::uint8_t days_in_month(std::uint16_t year, std::uint8_t month) {
  static const std::uint8_t days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return days[month - 1];
}

// YYMMDD with the two-digit year pivoting at 51 (00-50 -> 2000s).
Parsed<UdiDate> parse_ai_date(std::string_view s, bool& month_precision) {
  using R = Parsed<UdiDate>;
  month_precision = false;
  if (s.size() != 6 || !all_digits(s)) return R::failure(ParseErrc::BadDate);
  UdiDate d;
  int yy = (s[0] - '0') * 10 + (s[1] - '0');
  d.year = static_cast<std::uint16_t>(yy <= 50 ? 2000 + yy : 1900 + yy);
  d.month = static_cast<std::uint8_t>((s[2] - '0') * 10 + (s[3] - '0'));
  d.day = static_cast<std::uint8_t>((s[4] - '0') * 10 + (s[5] - '0'));
  if (d.month < 1 || d.month > 12) return R::failure(ParseErrc::BadDate);
  if (d.day == 0) {
    month_precision = true;
    d.day = days_in_month(d.year, d.month);
  } else if (d.day > days_in_month(d.year, d.month)) {
    return R::failure(ParseErrc::BadDate);
  }
  return R::success(d);
}

void format_ai_date(const UdiDate& d, bool month_precision, std::string& out) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02u%02u%02u", static_cast<unsigned>(d.year % 100),
                static_cast<unsigned>(d.month),
                month_precision ? 0u : static_cast<unsigned>(d.day));
  out += buf;
}

}  // namespace

const char* udi_agency_name(UdiAgency a) {
  switch (a) {
    case UdiAgency::GS1: return "GS1";
    case UdiAgency::MA: return "MA";
    case UdiAgency::AHM: return "AHM";
    case UdiAgency::OtherOpaque: return "other";
  }
  return "?";
}

const UdiAgencyTable& UdiAgencyTable::builtin() {
  static const UdiAgencyTable table =
      UdiAgencyTable::parse(builtin_assets::kUdiAgenciesTsv, "builtin udi agency table");
  return table;
}

UdiAgencyTable UdiAgencyTable::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open agency table: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

UdiAgencyTable UdiAgencyTable::parse(std::string_view content, const std::string& origin_label) {
  UdiAgencyTable t;
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
    auto bad = [&]() {
      fail(Errc::SpecError, origin_label + ": bad agency row " + std::to_string(line_no));
    };
    if (cols[0] == "gs1") {
      if (cols.size() < 3) bad();
      Gs1Row row;
      row.leading = cols[1] == "default" ? "" : std::string(cols[1]);
      row.part1_len = static_cast<std::size_t>(std::stoul(std::string(cols[2])));
      if (row.part1_len == 0 || row.part1_len > 13) bad();
      if (row.leading.empty()) {
        t.gs1_default_ = row.part1_len;
      } else {
        t.gs1_rows_.push_back(std::move(row));
      }
    } else if (cols[0] == "agency") {
      if (cols.size() < 5 || cols[3].size() != 1) bad();
      AgencyRow row;
      row.code_prefix = std::string(cols[1]);
      if (cols[2] == "MA") row.agency = UdiAgency::MA;
      else if (cols[2] == "AHM") row.agency = UdiAgency::AHM;
      else bad();
      row.delimiter = cols[3][0];
      row.delimiters_in_part1 = std::stoi(std::string(cols[4]));
      t.agency_rows_.push_back(std::move(row));
    } else {
      bad();
    }
  }
  std::sort(t.gs1_rows_.begin(), t.gs1_rows_.end(),
            [](const Gs1Row& a, const Gs1Row& b) { return a.leading.size() > b.leading.size(); });
  return t;
}

std::size_t UdiAgencyTable::gs1_part1_len(std::string_view gtin14) const {
  for (const auto& r : gs1_rows_) {
    if (gtin14.substr(0, r.leading.size()) == r.leading) return r.part1_len;
  }
  return gs1_default_;
}

const UdiAgencyTable::AgencyRow* UdiAgencyTable::match_agency(std::string_view di) const {
  for (const auto& r : agency_rows_) {
    if (di.substr(0, r.code_prefix.size()) == r.code_prefix) return &r;
  }
  return nullptr;
}

Parsed<bool> validate_gtin14_check(std::string_view payload) {
  using R = Parsed<bool>;
  if (payload.size() != 14 || !all_digits(payload)) {
    return R::failure(ParseErrc::NotFourteenDigits);
  }
  return R::success(gtin14_check_digit(payload.substr(0, 13)) == payload[13]);
}

char gtin14_check_digit(std::string_view payload13) {
  // weights 3,1,3,... from the rightmost payload digit
  int sum = 0;
  int w = 3;
  for (std::size_t i = payload13.size(); i-- > 0;) {
    sum += (payload13[i] - '0') * w;
    w = 4 - w;
  }
  return static_cast<char>('0' + (10 - sum % 10) % 10);
}

namespace {

// Parses the element-string forms. `machine` selects FNC1-delimited fields.
Parsed<UdiCode> parse_gs1(std::string_view s, bool machine) {
  using R = Parsed<UdiCode>;
  UdiCode code;
  bool have_di = false;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == kFnc1) {
      ++i;
      continue;
    }
    std::string_view ai;
    if (machine) {
      if (i + 2 > s.size()) return R::failure(ParseErrc::MalformedUdi);
      ai = s.substr(i, 2);
      i += 2;
    } else {
      if (s[i] != '(') return R::failure(ParseErrc::MalformedUdi);
      std::size_t close = s.find(')', i);
      if (close == std::string_view::npos) return R::failure(ParseErrc::MalformedUdi);
      ai = s.substr(i + 1, close - i - 1);
      i = close + 1;
    }
    auto take_fixed = [&](std::size_t n) -> std::optional<std::string_view> {
      if (i + n > s.size()) return std::nullopt;
      std::string_view v = s.substr(i, n);
      i += n;
      return v;
    };
    auto take_variable = [&]() -> std::string_view {
      std::size_t end = i;
      while (end < s.size() && s[end] != kFnc1 && !(!machine && s[end] == '(')) ++end;
      std::string_view v = s.substr(i, end - i);
      i = end;
      return v;
    };
    if (ai == "01") {
      auto v = take_fixed(14);
      if (!v || !all_digits(*v)) return R::failure(ParseErrc::MalformedUdi);
      auto check = validate_gtin14_check(*v);
      if (!check.ok() || !check.value) return R::failure(ParseErrc::BadCheckDigit);
      code.di.agency = UdiAgency::GS1;
      code.di.canonical = std::string(*v);
      have_di = true;
    } else if (ai == "11" || ai == "17") {
      auto v = take_fixed(6);
      if (!v) return R::failure(ParseErrc::BadDate);
      bool month_precision = false;
      auto d = parse_ai_date(*v, month_precision);
      if (!d.ok()) return R::failure(ParseErrc::BadDate);
      if (ai == "11") {
        code.pi.production_date = d.value;
        code.pi.production_month_precision = month_precision;
      } else {
        code.pi.expiry_date = d.value;
        code.pi.expiry_month_precision = month_precision;
      }
    } else if (ai == "10" || ai == "21") {
      std::string_view v = take_variable();
      if (v.empty() || v.size() > 20) return R::failure(ParseErrc::MalformedUdi);
      if (ai == "10") code.pi.lot = std::string(v);
      else code.pi.serial = std::string(v);
    } else {
      // only the five AIs above are defined for the registry DI/PI layout
      return R::failure(ParseErrc::MalformedUdi);
    }
  }
  if (!have_di) return R::failure(ParseErrc::MalformedUdi);
  return R::success(std::move(code));
}

}  // namespace

Parsed<UdiCode> parse_udi(std::string_view raw, const UdiAgencyTable& table) {
  using R = Parsed<UdiCode>;
  std::string_view s = text::trim(raw);
  if (s.empty()) return R::failure(ParseErrc::EmptyInput);

  // scanner symbology prefix, e.g. ]d2 or ]C1
  if (s.size() >= 3 && s[0] == ']') s.remove_prefix(3);
  if (s.empty()) return R::failure(ParseErrc::EmptyInput);

  Parsed<UdiCode> result;
  if (s.front() == '(') {
    result = parse_gs1(s, /*machine=*/false);
  } else if (s.front() == kFnc1 ||
             (s.size() >= 16 && s.substr(0, 2) == "01" && all_digits(s.substr(0, 4)))) {
    if (s.front() == kFnc1) s.remove_prefix(1);
    result = parse_gs1(s, /*machine=*/true);
  } else if (const auto* row = table.match_agency(s)) {
    UdiCode code;
    code.di.agency = row->agency;
    code.di.canonical = std::string(s);
    result = R::success(std::move(code));
  } else {
    UdiCode code;
    code.di.agency = UdiAgency::OtherOpaque;
    code.di.canonical = std::string(s);
    result = R::success(std::move(code));
  }
  if (!result.ok()) return result;
  auto parts = split_di_parts(result.value.di, table);
  result.value.di.part1 = std::move(parts.first);
  result.value.di.part2 = std::move(parts.second);
  return result;
}

std::string serialize_udi(const UdiCode& code) {
  std::string out;
  if (code.di.agency == UdiAgency::GS1) {
    out += "(01)";
    out += code.di.canonical;
    if (code.pi.production_date) {
      out += "(11)";
      format_ai_date(*code.pi.production_date, code.pi.production_month_precision, out);
    }
    if (code.pi.expiry_date) {
      out += "(17)";
      format_ai_date(*code.pi.expiry_date, code.pi.expiry_month_precision, out);
    }
    if (code.pi.lot) {
      out += "(10)";
      out += *code.pi.lot;
    }
    if (code.pi.serial) {
      out += "(21)";
      out += *code.pi.serial;
    }
    return out;
  }
  return code.di.canonical;
}

std::pair<std::string, std::string> split_di_parts(const DeviceIdentifier& di,
                                                   const UdiAgencyTable& table) {
  const std::string& c = di.canonical;
  switch (di.agency) {
    case UdiAgency::GS1: {
      std::size_t n = std::min(table.gs1_part1_len(c), c.size());
      return {c.substr(0, n), c.substr(n)};
    }
    case UdiAgency::MA:
    case UdiAgency::AHM: {
      const auto* row = table.match_agency(c);
      if (!row) return {"", c};
      int seen = 0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == row->delimiter && ++seen == row->delimiters_in_part1) {
          return {c.substr(0, i + 1), c.substr(i + 1)};
        }
      }
      return {"", c};
    }
    case UdiAgency::OtherOpaque:
      return {"", c};
  }
  return {"", c};
}

}  // namespace mdsw
