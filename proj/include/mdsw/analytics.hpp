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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "mdsw/annotate.hpp"

namespace mdsw {

/// Dimensions a device can be aggregated over. A device whose value for a
/// dimension is unknown (empty label) is excluded from percentage
/// denominators and reported in the unlabeled bucket.
enum class Dim : std::uint8_t {
  Origin = 0,
  SoftwareKind = 1,
  AiFlag = 2,
  DeviceClass = 3,
  Technique = 4,
  Specialty = 5,
  FunctionCategory = 6,
  Pathway = 7,
};

const char* dim_name(Dim d);
bool dim_from_name(std::string_view name, Dim& out);

/// Label of `device` along `dim`; empty when unknown for that device.
std::string dim_value(const AnnotatedDevice& device, Dim dim);

struct CrossTab {
  std::vector<std::string> dims;
  std::map<std::vector<std::string>, std::uint64_t> cells;  // lexicographic
  std::uint64_t total = 0;

  bool operator==(const CrossTab&) const = default;
};

/// Exact integer counts over the given dimensions; devices lacking a value
/// for any requested dimension land in a cell with an empty component.
CrossTab crosstab(std::span<const AnnotatedDevice> devices, std::span<const Dim> dims);

/// Sums `tab` over dimension `drop`, yielding the cross-tab on the rest.
CrossTab marginal(const CrossTab& tab, std::size_t drop);

struct DistributionRow {
  std::string value;
  std::uint64_t count = 0;
  std::uint32_t pct_permille = 0;  // half-up, e.g. 744 = 74.4%
  std::string pct_text;            // "74.4"

  bool operator==(const DistributionRow&) const = default;
};

struct Distribution {
  std::string dim;
  std::uint64_t denominator = 0;  // devices with a known value
  std::uint64_t unlabeled = 0;    // devices without one
  std::vector<DistributionRow> rows;  // count desc, then label asc

  bool operator==(const Distribution&) const = default;
};

/// Optional label merging (e.g. reporting two specialties jointly):
/// label -> group name applied before counting.
using LabelGroups = std::map<std::string, std::string>;

Distribution distribution(std::span<const AnnotatedDevice> devices, Dim dim,
                          const LabelGroups* groups = nullptr);

/// Half-up permille of count/denominator (exact integer arithmetic).
std::uint32_t pct_permille_half_up(std::uint64_t count, std::uint64_t denominator);
std::string pct_text_from_permille(std::uint32_t permille);

struct GeoRollup {
  /// Region key -> count. Contains province keys, plus "National" for the
  /// class III national bucket and "Xu" for the SAR bucket.
  std::map<std::string, std::uint64_t> regions;
  std::uint64_t national_class3 = 0;
  std::uint64_t xu = 0;
  std::uint64_t undetermined = 0;  // domestic-or-unknown without a region
  std::uint64_t imported_excluded = 0;
  std::uint64_t total_considered = 0;  // everything except imported

  bool operator==(const GeoRollup&) const = default;
};

/// Province rollup of non-foreign devices: class III domestic registrations
/// sit in the national bucket, others in their issuing province, SAR
/// separately; imported devices are excluded.
GeoRollup geo_rollup(std::span<const AnnotatedDevice> devices);

/// Flow triples for the alluvial family: software kind -> device class ->
/// pathway, with counts, sorted lexicographically.
struct FlowTriple {
  std::string source;
  std::string middle;
  std::string target;
  std::uint64_t count = 0;

  bool operator==(const FlowTriple&) const = default;
};

std::vector<FlowTriple> alluvial_flows(std::span<const AnnotatedDevice> devices);

}  // namespace mdsw
