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
#include <string>
#include <vector>

#include "mdsw/analytics.hpp"
#include "mdsw/ingest.hpp"

namespace mdsw {

/// Volatile run facts live only in run_metadata.json; everything in the
/// bundle itself is a pure function of the inputs, so emitted data files are
/// byte-identical across reruns and worker counts.
struct RunMetadata {
  std::string tool_version;
  std::string dataset_path;
  std::string dataset_fingerprint;
  std::string pipeline_name;
  std::string pipeline_fingerprint;
  std::map<std::string, std::string> asset_fingerprints;  // lexicons, exclusions, sidecar

  bool operator==(const RunMetadata&) const = default;
};

struct AuditTrail {
  std::vector<ExclusionReport::Removal> exclusions_applied;
  std::vector<ExclusionEntry> exclusions_stale;
  std::vector<SidecarOutcome::Applied> overrides;
  std::vector<Sidecar::Entry> sidecar_stale;
  std::uint64_t origin_fallback_count = 0;
  std::uint64_t origin_undetermined_count = 0;
  std::uint64_t technique_defaulted_count = 0;
  std::uint64_t regnum_parse_failures = 0;
  std::uint64_t regnum_code_inconsistencies = 0;
  std::vector<std::string> inconsistent_record_ids;  // capped sample

  bool operator==(const AuditTrail&) const = default;
};

struct ReportBundle {
  RunMetadata metadata;
  std::vector<std::pair<std::string, std::uint64_t>> stage_counts;
  /// Distinct-DI counts per stage, only when dedup was requested.
  std::vector<std::pair<std::string, std::uint64_t>> stage_distinct_di;
  std::uint64_t mdsw_total = 0;       // base of the cross-tab family
  std::uint64_t aimd_final_total = 0; // base of the AI device families
  IngestStats ingest;                 // elapsed excluded from serialization
  CrossTab origin_kind_ai;
  std::vector<std::pair<std::string, Distribution>> distributions;
  GeoRollup geo;
  std::vector<FlowTriple> alluvial;
  AuditTrail audit;

  /// Internal consistency: table bases match the stage counts.
  void validate() const;

  std::string to_json_text() const;
  static ReportBundle from_json_text(std::string_view json_text,
                                     const std::string& origin_label);

  bool operator==(const ReportBundle&) const = default;
};

enum class ReportFormat : std::uint8_t {
  StructuredData = 1,   // bundle.json
  DelimitedTable = 2,   // tables/*.csv
  HumanReadable = 4,    // report.md
  All = 7,
};

/// Writes the bundle under `out_dir` (created if needed). Deterministic:
/// identical bundles produce byte-identical files. `volatile_metadata_json`
/// (timestamp, timings, worker count) goes to run_metadata.json only.
void emit_report(const ReportBundle& bundle, ReportFormat format, const std::string& out_dir,
                 const std::string& volatile_metadata_json);

}  // namespace mdsw
