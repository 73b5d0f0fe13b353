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

#include "mdsw/schema.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mdsw/builtin_assets.hpp"
#include "mdsw/error.hpp"

namespace mdsw {

const std::vector<std::string>& SchemaMap::bindable_fields() {
  static const std::vector<std::string> fields = {
      "record_id",    "product_name",        "generic_name",
      "description",  "manufacturer",        "region",
      "classification_code", "registration_number"};
  return fields;
}

const SchemaMap& SchemaMap::builtin_default() {
  static const SchemaMap schema =
      SchemaMap::from_json_text(builtin_assets::kDefaultSchemaJson, "builtin schema map");
  return schema;
}

SchemaMap SchemaMap::from_json_text(std::string_view json_text, const std::string& origin_label) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::SpecError, origin_label + ": invalid schema JSON: " + e.what());
  }
  SchemaMap s;
  s.name_ = doc.value("name", "unnamed");
  if (!doc.contains("bindings") || !doc["bindings"].is_object()) {
    fail(Errc::SpecError, origin_label + ": schema needs a bindings object");
  }
  for (auto& [field, header] : doc["bindings"].items()) {
    if (!header.is_string()) {
      fail(Errc::SpecError, origin_label + ": binding for '" + field + "' must be a string");
    }
    s.bindings_.push_back({field, header.get<std::string>()});
  }
  if (doc.contains("required")) {
    for (auto& f : doc["required"]) s.required_.insert(f.get<std::string>());
  }
  s.validate(origin_label);
  return s;
}

SchemaMap SchemaMap::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open schema map: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), path);
}

void SchemaMap::validate(const std::string& origin_label) const {
  const auto& legal = bindable_fields();
  for (const auto& b : bindings_) {
    if (std::find(legal.begin(), legal.end(), b.field) == legal.end()) {
      fail(Errc::SpecError, origin_label + ": unknown record field '" + b.field + "'");
    }
    if (b.header.empty()) {
      fail(Errc::SpecError, origin_label + ": empty header for field '" + b.field + "'");
    }
  }
  for (std::size_t i = 0; i < bindings_.size(); ++i) {
    for (std::size_t j = i + 1; j < bindings_.size(); ++j) {
      if (bindings_[i].header == bindings_[j].header) {
        fail(Errc::SpecError, origin_label + ": fields '" + bindings_[i].field + "' and '" +
                                  bindings_[j].field + "' bound to the same column '" +
                                  bindings_[i].header + "'");
      }
      if (bindings_[i].field == bindings_[j].field) {
        fail(Errc::SpecError, origin_label + ": field '" + bindings_[i].field + "' bound twice");
      }
    }
  }
  for (const auto& r : required_) {
    if (header_for(r).empty()) {
      fail(Errc::SpecError, origin_label + ": required field '" + r + "' has no binding");
    }
  }
}

std::string_view SchemaMap::header_for(std::string_view field) const {
  for (const auto& b : bindings_) {
    if (b.field == field) return b.header;
  }
  return {};
}

}  // namespace mdsw
