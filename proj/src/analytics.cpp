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

#include "mdsw/analytics.hpp"

#include <algorithm>

namespace mdsw {

const char* dim_name(Dim d) {
  switch (d) {
    case Dim::Origin: return "origin";
    case Dim::SoftwareKind: return "software_kind";
    case Dim::AiFlag: return "ai_flag";
    case Dim::DeviceClass: return "device_class";
    case Dim::Technique: return "technique";
    case Dim::Specialty: return "specialty";
    case Dim::FunctionCategory: return "function_category";
    case Dim::Pathway: return "pathway";
  }
  return "?";
}

bool dim_from_name(std::string_view name, Dim& out) {
  if (name == "origin") out = Dim::Origin;
  else if (name == "software_kind") out = Dim::SoftwareKind;
  else if (name == "ai_flag") out = Dim::AiFlag;
  else if (name == "device_class") out = Dim::DeviceClass;
  else if (name == "technique") out = Dim::Technique;
  else if (name == "specialty") out = Dim::Specialty;
  else if (name == "function_category") out = Dim::FunctionCategory;
  else if (name == "pathway") out = Dim::Pathway;
  else return false;
  return true;
}

std::string dim_value(const AnnotatedDevice& d, Dim dim) {
  switch (dim) {
    case Dim::Origin:
      return d.origin.ok() ? origin_name(d.origin.value.origin) : "";
    case Dim::SoftwareKind:
      return software_kind_name(d.software_kind);
    case Dim::AiFlag:
      return d.ai_flag ? "ai" : "non_ai";
    case Dim::DeviceClass:
      return d.regnum.ok() ? device_class_name(d.regnum.value.device_class) : "";
    case Dim::Technique:
      return d.technique == Technique::NotAI ? "" : technique_name(d.technique);
    case Dim::Specialty:
      return d.specialty == "Unknown" ? "" : d.specialty;
    case Dim::FunctionCategory: {
      std::string v = function_category_name(d.function_category);
      if (d.subtype) v += std::string("/") + decision_subtype_name(*d.subtype);
      return v;
    }
    case Dim::Pathway:
      return d.pathway == Pathway::Unknown ? "" : pathway_name(d.pathway);
  }
  return "";
}

CrossTab crosstab(std::span<const AnnotatedDevice> devices, std::span<const Dim> dims) {
  CrossTab tab;
  for (Dim d : dims) tab.dims.emplace_back(dim_name(d));
  std::vector<std::string> key;
  for (const auto& dev : devices) {
    key.clear();
    for (Dim d : dims) key.push_back(dim_value(dev, d));
    ++tab.cells[key];
    ++tab.total;
  }
  return tab;
}

CrossTab marginal(const CrossTab& tab, std::size_t drop) {
  CrossTab out;
  for (std::size_t i = 0; i < tab.dims.size(); ++i) {
    if (i != drop) out.dims.push_back(tab.dims[i]);
  }
  for (const auto& [key, count] : tab.cells) {
    std::vector<std::string> reduced;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (i != drop) reduced.push_back(key[i]);
    }
    out.cells[reduced] += count;
    out.total += count;
  }
  return out;
}

std::uint32_t pct_permille_half_up(std::uint64_t count, std::uint64_t denominator) {
  if (denominator == 0) return 0;
  // round(1000 * count / denominator), half away from zero, exactly
  return static_cast<std::uint32_t>((2000 * count + denominator) / (2 * denominator));
}

std::string pct_text_from_permille(std::uint32_t permille) {
  return std::to_string(permille / 10) + "." + std::to_string(permille % 10);
}

Distribution distribution(std::span<const AnnotatedDevice> devices, Dim dim,
                          const LabelGroups* groups) {
  Distribution dist;
  dist.dim = dim_name(dim);
  std::map<std::string, std::uint64_t> counts;
  for (const auto& d : devices) {
    std::string v = dim_value(d, dim);
    if (v.empty()) {
      ++dist.unlabeled;
      continue;
    }
    if (groups) {
      auto it = groups->find(v);
      if (it != groups->end()) v = it->second;
    }
    ++counts[v];
    ++dist.denominator;
  }
  for (auto& [value, count] : counts) {
    DistributionRow row;
    row.value = value;
    row.count = count;
    row.pct_permille = pct_permille_half_up(count, dist.denominator);
    row.pct_text = pct_text_from_permille(row.pct_permille);
    dist.rows.push_back(std::move(row));
  }
  std::sort(dist.rows.begin(), dist.rows.end(),
            [](const DistributionRow& a, const DistributionRow& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.value < b.value;
            });
  return dist;
}

GeoRollup geo_rollup(std::span<const AnnotatedDevice> devices) {
  GeoRollup roll;
  for (const auto& d : devices) {
    if (d.origin.ok() && d.origin.value.origin == Origin::Imported) {
      ++roll.imported_excluded;
      continue;
    }
    ++roll.total_considered;
    if (d.origin.ok() && d.origin.value.origin == Origin::SAR) {
      ++roll.xu;
      ++roll.regions["Xu"];
      continue;
    }
    if (d.regnum.ok()) {
      const RegistrationNumber& r = d.regnum.value;
      if (r.device_class == DeviceClass::III || r.scope == "National") {
        ++roll.national_class3;
        ++roll.regions["National"];
      } else {
        ++roll.regions[r.scope];
      }
      continue;
    }
    // fell back to the region heuristic, or nothing at all
    if (d.origin.ok() && !d.origin.value.scope.empty()) {
      ++roll.regions[d.origin.value.scope];
    } else {
      ++roll.undetermined;
    }
  }
  return roll;
}

std::vector<FlowTriple> alluvial_flows(std::span<const AnnotatedDevice> devices) {
  std::map<std::vector<std::string>, std::uint64_t> counts;
  for (const auto& d : devices) {
    std::string cls = d.regnum.ok() ? device_class_name(d.regnum.value.device_class) : "unknown";
    counts[{software_kind_name(d.software_kind), cls, pathway_name(d.pathway)}] += 1;
  }
  std::vector<FlowTriple> flows;
  for (const auto& [key, count] : counts) {
    flows.push_back({key[0], key[1], key[2], count});
  }
  return flows;
}

}  // namespace mdsw
