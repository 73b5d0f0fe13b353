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

#include "mdsw/record.hpp"

#include <cstdio>

#include "mdsw/text.hpp"

namespace mdsw {

const char* device_class_name(DeviceClass c) {
  switch (c) {
    case DeviceClass::I: return "I";
    case DeviceClass::II: return "II";
    case DeviceClass::III: return "III";
  }
  return "?";
}

std::string ClassificationCode::to_string() const {
  char buf[12];
  int n = 0;
  for (std::uint8_t i = 0; i < count; ++i) {
    n += std::snprintf(buf + n, sizeof(buf) - n, i == 0 ? "%02u" : "-%02u",
                       static_cast<unsigned>(segments[i]));
  }
  return std::string(buf, n);
}

Parsed<ClassificationCode> parse_classification_code(std::string_view raw) {
  std::string_view s = text::trim(raw);
  if (s.empty()) return Parsed<ClassificationCode>::failure(ParseErrc::MalformedCode);
  ClassificationCode code;
  std::size_t i = 0;
  while (true) {
    if (code.count == 3) return Parsed<ClassificationCode>::failure(ParseErrc::MalformedCode);
    // exactly two digits per segment
    if (i + 2 > s.size() || s[i] < '0' || s[i] > '9' || s[i + 1] < '0' || s[i + 1] > '9') {
      return Parsed<ClassificationCode>::failure(ParseErrc::MalformedCode);
    }
    code.segments[code.count++] =
        static_cast<std::uint8_t>((s[i] - '0') * 10 + (s[i + 1] - '0'));
    i += 2;
    if (i == s.size()) break;
    if (s[i] != '-') return Parsed<ClassificationCode>::failure(ParseErrc::MalformedCode);
    ++i;
    if (i == s.size()) return Parsed<ClassificationCode>::failure(ParseErrc::MalformedCode);
  }
  return Parsed<ClassificationCode>::success(code);
}

bool is_samd_code(const ClassificationCode& code) {
  return code.count > 0 && code.segments[0] == 21;
}

const char* text_field_name(TextField f) {
  switch (f) {
    case TextField::ProductName: return "product_name";
    case TextField::GenericName: return "generic_name";
    case TextField::Description: return "description";
    case TextField::Manufacturer: return "manufacturer";
    case TextField::Region: return "region";
  }
  return "?";
}

bool text_field_from_name(std::string_view name, TextField& out) {
  if (name == "product_name") out = TextField::ProductName;
  else if (name == "generic_name") out = TextField::GenericName;
  else if (name == "description") out = TextField::Description;
  else if (name == "manufacturer") out = TextField::Manufacturer;
  else if (name == "region") out = TextField::Region;
  else return false;
  return true;
}

DeviceRecord DeviceRecord::copy_of(const RecordView& v) {
  DeviceRecord r;
  r.record_id = v.record_id;
  r.product_name = v.product_name;
  r.generic_name = v.generic_name;
  r.description = v.description;
  r.manufacturer = v.manufacturer;
  r.region_raw = v.region_raw;
  r.classification_code_raw = v.classification_code_raw;
  r.registration_number_raw = v.registration_number_raw;
  r.extra.reserve(v.extra.size());
  for (const auto& [k, val] : v.extra) r.extra.emplace_back(std::string(k), std::string(val));
  r.row_ordinal = v.row_ordinal;
  return r;
}

RecordView DeviceRecord::view() const {
  RecordView v;
  v.record_id = record_id;
  v.product_name = product_name;
  v.generic_name = generic_name;
  v.description = description;
  v.manufacturer = manufacturer;
  v.region_raw = region_raw;
  v.classification_code_raw = classification_code_raw;
  v.registration_number_raw = registration_number_raw;
  v.row_ordinal = row_ordinal;
  // extra spans owned pairs of std::string; a view can't borrow them without
  // a parallel view vector, which callers that need extra build themselves
  return v;
}

}  // namespace mdsw
