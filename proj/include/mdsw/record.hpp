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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mdsw/error.hpp"

namespace mdsw {

/// Risk classes, ordered low to high.
enum class DeviceClass : std::uint8_t { I = 1, II = 2, III = 3 };

const char* device_class_name(DeviceClass c);  // "I" / "II" / "III"

/// Hierarchical catalogue code: one to three two-digit segments.
struct ClassificationCode {
  std::array<std::uint8_t, 3> segments{};
  std::uint8_t count = 0;

  bool operator==(const ClassificationCode&) const = default;
  std::string to_string() const;  // "21-01-01" form
};

/// Decodes "NN", "NN-NN" or "NN-NN-NN" (surrounding whitespace ignored).
Parsed<ClassificationCode> parse_classification_code(std::string_view raw);

/// True iff the leading segment is 21, the standalone-software category.
/// Depends only on segments[0].
bool is_samd_code(const ClassificationCode& code);

/// Text fields that keyword rules may scan.
enum class TextField : std::uint8_t {
  ProductName = 0,
  GenericName = 1,
  Description = 2,
  Manufacturer = 3,
  Region = 4,
};
inline constexpr std::size_t kTextFieldCount = 5;

const char* text_field_name(TextField f);
bool text_field_from_name(std::string_view name, TextField& out);

/// One registry row, borrowed. Bound text fields are already in canonical
/// normalized form; `extra` keeps the remaining dump columns verbatim.
/// Views stay valid only until the producing stream advances.
struct RecordView {
  std::string_view record_id;
  std::string_view product_name;
  std::string_view generic_name;
  std::string_view description;
  std::string_view manufacturer;
  std::string_view region_raw;
  std::string_view classification_code_raw;
  std::string_view registration_number_raw;
  std::span<const std::pair<std::string_view, std::string_view>> extra;
  std::uint64_t row_ordinal = 0;

  std::string_view text(TextField f) const {
    switch (f) {
      case TextField::ProductName: return product_name;
      case TextField::GenericName: return generic_name;
      case TextField::Description: return description;
      case TextField::Manufacturer: return manufacturer;
      case TextField::Region: return region_raw;
    }
    return {};
  }
};

/// Owning counterpart of RecordView, materialized for pipeline survivors.
struct DeviceRecord {
  std::string record_id;
  std::string product_name;
  std::string generic_name;
  std::string description;
  std::string manufacturer;
  std::string region_raw;
  std::string classification_code_raw;
  std::string registration_number_raw;
  std::vector<std::pair<std::string, std::string>> extra;  // column order
  std::uint64_t row_ordinal = 0;

  static DeviceRecord copy_of(const RecordView& v);
  RecordView view() const;

  bool operator==(const DeviceRecord&) const = default;
};

}  // namespace mdsw
