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

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mdsw {

/// Binds DeviceRecord fields to dump column headers. Binding is by header
/// name, never position; column layouts reorder across releases.
class SchemaMap {
 public:
  struct Binding {
    std::string field;   // one of the bindable field names below
    std::string header;  // source column header
  };

  static const std::vector<std::string>& bindable_fields();

  static const SchemaMap& builtin_default();
  static SchemaMap from_json_text(std::string_view json_text, const std::string& origin_label);
  static SchemaMap load_file(const std::string& path);

  const std::string& name() const { return name_; }
  const std::vector<Binding>& bindings() const { return bindings_; }
  const std::set<std::string>& required() const { return required_; }

  /// Header bound to `field`, empty when unbound.
  std::string_view header_for(std::string_view field) const;

 private:
  void validate(const std::string& origin_label) const;

  std::string name_;
  std::vector<Binding> bindings_;
  std::set<std::string> required_;
};

}  // namespace mdsw
