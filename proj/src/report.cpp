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

#include "mdsw/report.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mdsw/csv.hpp"
#include "mdsw/error.hpp"

namespace mdsw {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json crosstab_to_json(const CrossTab& t) {
  ordered_json j;
  j["dims"] = t.dims;
  j["total"] = t.total;
  j["cells"] = ordered_json::array();
  for (const auto& [key, count] : t.cells) {
    ordered_json cell;
    cell["key"] = key;
    cell["count"] = count;
    j["cells"].push_back(std::move(cell));
  }
  return j;
}

CrossTab crosstab_from_json(const ordered_json& j) {
  CrossTab t;
  t.dims = j.at("dims").get<std::vector<std::string>>();
  t.total = j.at("total").get<std::uint64_t>();
  for (const auto& cell : j.at("cells")) {
    t.cells[cell.at("key").get<std::vector<std::string>>()] =
        cell.at("count").get<std::uint64_t>();
  }
  return t;
}

ordered_json distribution_to_json(const Distribution& d) {
  ordered_json j;
  j["dim"] = d.dim;
  j["denominator"] = d.denominator;
  j["unlabeled"] = d.unlabeled;
  j["rows"] = ordered_json::array();
  for (const auto& r : d.rows) {
    ordered_json row;
    row["value"] = r.value;
    row["count"] = r.count;
    row["pct"] = r.pct_text;
    j["rows"].push_back(std::move(row));
  }
  return j;
}

Distribution distribution_from_json(const ordered_json& j) {
  Distribution d;
  d.dim = j.at("dim").get<std::string>();
  d.denominator = j.at("denominator").get<std::uint64_t>();
  d.unlabeled = j.at("unlabeled").get<std::uint64_t>();
  for (const auto& row : j.at("rows")) {
    DistributionRow r;
    r.value = row.at("value").get<std::string>();
    r.count = row.at("count").get<std::uint64_t>();
    r.pct_text = row.at("pct").get<std::string>();
    std::size_t dot = r.pct_text.find('.');
    r.pct_permille = static_cast<std::uint32_t>(
        std::stoul(r.pct_text.substr(0, dot)) * 10 + std::stoul(r.pct_text.substr(dot + 1)));
    d.rows.push_back(std::move(r));
  }
  return d;
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot create " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) fail(Errc::IoError, "write failed: " + path.string());
}

void append_csv(std::string& out, std::initializer_list<std::string_view> cells) {
  bool first = true;
  for (std::string_view c : cells) {
    if (!first) out.push_back(',');
    csv_append_field(out, c, ',');
    first = false;
  }
  out.push_back('\n');
}

}  // namespace

void ReportBundle::validate() const {
  if (origin_kind_ai.total != mdsw_total) {
    fail(Errc::Internal, "bundle cross-tab total disagrees with the mdsw stage count");
  }
  for (const auto& [name, dist] : distributions) {
    std::uint64_t base = name.ends_with("_aimd") ? aimd_final_total : mdsw_total;
    if (dist.denominator + dist.unlabeled != base) {
      fail(Errc::Internal, "bundle table '" + name + "' total disagrees with its stage count");
    }
  }
  std::uint64_t flow_total = 0;
  for (const auto& f : alluvial) flow_total += f.count;
  if (flow_total != aimd_final_total) {
    fail(Errc::Internal, "bundle alluvial flow total disagrees with the final AI count");
  }
}

std::string ReportBundle::to_json_text() const {
  ordered_json j;
  ordered_json meta;
  meta["tool_version"] = metadata.tool_version;
  meta["dataset_path"] = metadata.dataset_path;
  meta["dataset_fingerprint"] = metadata.dataset_fingerprint;
  meta["pipeline_name"] = metadata.pipeline_name;
  meta["pipeline_fingerprint"] = metadata.pipeline_fingerprint;
  meta["asset_fingerprints"] = metadata.asset_fingerprints;
  j["metadata"] = std::move(meta);

  ordered_json counts = ordered_json::array();
  for (const auto& [name, count] : stage_counts) {
    ordered_json c;
    c["stage"] = name;
    c["count"] = count;
    counts.push_back(std::move(c));
  }
  j["stage_counts"] = std::move(counts);

  if (!stage_distinct_di.empty()) {
    ordered_json dd = ordered_json::array();
    for (const auto& [name, count] : stage_distinct_di) {
      ordered_json c;
      c["stage"] = name;
      c["distinct_di"] = count;
      dd.push_back(std::move(c));
    }
    j["stage_distinct_di"] = std::move(dd);
  }

  j["mdsw_total"] = mdsw_total;
  j["aimd_final_total"] = aimd_final_total;

  ordered_json stats;
  stats["rows_read"] = ingest.rows_read;
  stats["rows_emitted"] = ingest.rows_emitted;
  stats["rows_skipped_malformed"] = ingest.rows_skipped_malformed;
  stats["per_error_counts"] = ingest.per_error_counts;
  j["ingest"] = std::move(stats);

  j["origin_kind_ai"] = crosstab_to_json(origin_kind_ai);

  ordered_json dists = ordered_json::array();
  for (const auto& [name, dist] : distributions) {
    ordered_json d;
    d["name"] = name;
    d["data"] = distribution_to_json(dist);
    dists.push_back(std::move(d));
  }
  j["distributions"] = std::move(dists);

  ordered_json geo_json;
  geo_json["regions"] = geo.regions;
  geo_json["national_class3"] = geo.national_class3;
  geo_json["xu"] = geo.xu;
  geo_json["undetermined"] = geo.undetermined;
  geo_json["imported_excluded"] = geo.imported_excluded;
  geo_json["total_considered"] = geo.total_considered;
  j["map_data"] = std::move(geo_json);

  ordered_json flows = ordered_json::array();
  for (const auto& f : alluvial) {
    ordered_json fj;
    fj["source"] = f.source;
    fj["middle"] = f.middle;
    fj["target"] = f.target;
    fj["count"] = f.count;
    flows.push_back(std::move(fj));
  }
  j["alluvial_data"] = std::move(flows);

  ordered_json audit_json;
  ordered_json removals = ordered_json::array();
  for (const auto& r : audit.exclusions_applied) {
    ordered_json rj;
    rj["key"] = r.key;
    rj["reason"] = r.reason;
    rj["record_id"] = r.record_id;
    removals.push_back(std::move(rj));
  }
  audit_json["exclusions_applied"] = std::move(removals);
  ordered_json stale = ordered_json::array();
  for (const auto& e : audit.exclusions_stale) {
    ordered_json ej;
    ej["key"] = e.key;
    ej["reason"] = e.reason;
    stale.push_back(std::move(ej));
  }
  audit_json["exclusions_stale"] = std::move(stale);
  ordered_json overrides = ordered_json::array();
  for (const auto& o : audit.overrides) {
    ordered_json oj;
    oj["key"] = o.key;
    oj["record_id"] = o.record_id;
    oj["field"] = o.field;
    oj["old"] = o.old_value;
    oj["new"] = o.new_value;
    oj["note"] = o.note;
    overrides.push_back(std::move(oj));
  }
  audit_json["overrides"] = std::move(overrides);
  ordered_json sstale = ordered_json::array();
  for (const auto& e : audit.sidecar_stale) {
    ordered_json ej;
    ej["key"] = e.key;
    ej["field"] = e.field;
    ej["value"] = e.value;
    ej["note"] = e.note;
    sstale.push_back(std::move(ej));
  }
  audit_json["sidecar_stale"] = std::move(sstale);
  audit_json["origin_fallback_count"] = audit.origin_fallback_count;
  audit_json["origin_undetermined_count"] = audit.origin_undetermined_count;
  audit_json["technique_defaulted_count"] = audit.technique_defaulted_count;
  audit_json["regnum_parse_failures"] = audit.regnum_parse_failures;
  audit_json["regnum_code_inconsistencies"] = audit.regnum_code_inconsistencies;
  audit_json["inconsistent_record_ids"] = audit.inconsistent_record_ids;
  j["audit"] = std::move(audit_json);

  return j.dump(2) + "\n";
}

ReportBundle ReportBundle::from_json_text(std::string_view json_text,
                                          const std::string& origin_label) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, origin_label + ": invalid bundle JSON: " + e.what());
  }
  ReportBundle b;
  try {
    const auto& meta = j.at("metadata");
    b.metadata.tool_version = meta.at("tool_version").get<std::string>();
    b.metadata.dataset_path = meta.at("dataset_path").get<std::string>();
    b.metadata.dataset_fingerprint = meta.at("dataset_fingerprint").get<std::string>();
    b.metadata.pipeline_name = meta.at("pipeline_name").get<std::string>();
    b.metadata.pipeline_fingerprint = meta.at("pipeline_fingerprint").get<std::string>();
    b.metadata.asset_fingerprints =
        meta.at("asset_fingerprints").get<std::map<std::string, std::string>>();
    for (const auto& c : j.at("stage_counts")) {
      b.stage_counts.emplace_back(c.at("stage").get<std::string>(),
                                  c.at("count").get<std::uint64_t>());
    }
    if (j.contains("stage_distinct_di")) {
      for (const auto& c : j.at("stage_distinct_di")) {
        b.stage_distinct_di.emplace_back(c.at("stage").get<std::string>(),
                                         c.at("distinct_di").get<std::uint64_t>());
      }
    }
    b.mdsw_total = j.at("mdsw_total").get<std::uint64_t>();
    b.aimd_final_total = j.at("aimd_final_total").get<std::uint64_t>();
    const auto& stats = j.at("ingest");
    b.ingest.rows_read = stats.at("rows_read").get<std::uint64_t>();
    b.ingest.rows_emitted = stats.at("rows_emitted").get<std::uint64_t>();
    b.ingest.rows_skipped_malformed = stats.at("rows_skipped_malformed").get<std::uint64_t>();
    b.ingest.per_error_counts =
        stats.at("per_error_counts").get<std::map<std::string, std::uint64_t>>();
    b.origin_kind_ai = crosstab_from_json(j.at("origin_kind_ai"));
    for (const auto& d : j.at("distributions")) {
      b.distributions.emplace_back(d.at("name").get<std::string>(),
                                   distribution_from_json(d.at("data")));
    }
    const auto& geo_json = j.at("map_data");
    b.geo.regions = geo_json.at("regions").get<std::map<std::string, std::uint64_t>>();
    b.geo.national_class3 = geo_json.at("national_class3").get<std::uint64_t>();
    b.geo.xu = geo_json.at("xu").get<std::uint64_t>();
    b.geo.undetermined = geo_json.at("undetermined").get<std::uint64_t>();
    b.geo.imported_excluded = geo_json.at("imported_excluded").get<std::uint64_t>();
    b.geo.total_considered = geo_json.at("total_considered").get<std::uint64_t>();
    for (const auto& f : j.at("alluvial_data")) {
      b.alluvial.push_back({f.at("source").get<std::string>(), f.at("middle").get<std::string>(),
                            f.at("target").get<std::string>(),
                            f.at("count").get<std::uint64_t>()});
    }
    const auto& a = j.at("audit");
    for (const auto& r : a.at("exclusions_applied")) {
      b.audit.exclusions_applied.push_back({r.at("key").get<std::string>(),
                                            r.at("reason").get<std::string>(),
                                            r.at("record_id").get<std::string>()});
    }
    for (const auto& e : a.at("exclusions_stale")) {
      b.audit.exclusions_stale.push_back(
          {e.at("key").get<std::string>(), e.at("reason").get<std::string>()});
    }
    for (const auto& o : a.at("overrides")) {
      b.audit.overrides.push_back({o.at("key").get<std::string>(),
                                   o.at("record_id").get<std::string>(),
                                   o.at("field").get<std::string>(),
                                   o.at("old").get<std::string>(),
                                   o.at("new").get<std::string>(),
                                   o.at("note").get<std::string>()});
    }
    for (const auto& e : a.at("sidecar_stale")) {
      b.audit.sidecar_stale.push_back(
          {e.at("key").get<std::string>(), e.at("field").get<std::string>(),
           e.at("value").get<std::string>(), e.at("note").get<std::string>()});
    }
    b.audit.origin_fallback_count = a.at("origin_fallback_count").get<std::uint64_t>();
    b.audit.origin_undetermined_count = a.at("origin_undetermined_count").get<std::uint64_t>();
    b.audit.technique_defaulted_count = a.at("technique_defaulted_count").get<std::uint64_t>();
    b.audit.regnum_parse_failures = a.at("regnum_parse_failures").get<std::uint64_t>();
    b.audit.regnum_code_inconsistencies =
        a.at("regnum_code_inconsistencies").get<std::uint64_t>();
    b.audit.inconsistent_record_ids =
        a.at("inconsistent_record_ids").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, origin_label + ": bundle JSON missing fields: " + e.what());
  }
  return b;
}

void emit_report(const ReportBundle& bundle, ReportFormat format, const std::string& out_dir,
                 const std::string& volatile_metadata_json) {
  bundle.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(Errc::IoError, "cannot create output directory: " + out_dir);
  const fs::path root(out_dir);

  write_file(root / "run_metadata.json", volatile_metadata_json);

  auto has = [&](ReportFormat f) {
    return (static_cast<unsigned>(format) & static_cast<unsigned>(f)) != 0;
  };

  if (has(ReportFormat::StructuredData)) {
    write_file(root / "bundle.json", bundle.to_json_text());
  }

  if (has(ReportFormat::DelimitedTable)) {
    fs::create_directories(root / "tables", ec);
    std::string csv;
    csv.clear();
    append_csv(csv, {"stage", "count"});
    for (const auto& [name, count] : bundle.stage_counts) {
      append_csv(csv, {name, std::to_string(count)});
    }
    write_file(root / "tables" / "stage_counts.csv", csv);

    if (!bundle.stage_distinct_di.empty()) {
      csv.clear();
      append_csv(csv, {"stage", "distinct_di"});
      for (const auto& [name, count] : bundle.stage_distinct_di) {
        append_csv(csv, {name, std::to_string(count)});
      }
      write_file(root / "tables" / "stage_distinct_di.csv", csv);
    }

    csv.clear();
    {
      std::string header;
      for (const auto& d : bundle.origin_kind_ai.dims) {
        csv_append_field(header, d, ',');
        header.push_back(',');
      }
      header += "count\n";
      csv += header;
      for (const auto& [key, count] : bundle.origin_kind_ai.cells) {
        std::string line;
        for (const auto& k : key) {
          csv_append_field(line, k, ',');
          line.push_back(',');
        }
        line += std::to_string(count);
        line.push_back('\n');
        csv += line;
      }
    }
    write_file(root / "tables" / "origin_kind_ai.csv", csv);

    for (const auto& [name, dist] : bundle.distributions) {
      csv.clear();
      append_csv(csv, {"value", "count", "pct", "denominator", "unlabeled"});
      for (const auto& r : dist.rows) {
        append_csv(csv, {r.value, std::to_string(r.count), r.pct_text,
                         std::to_string(dist.denominator), std::to_string(dist.unlabeled)});
      }
      write_file(root / "tables" / (name + ".csv"), csv);
    }

    csv.clear();
    append_csv(csv, {"region", "count"});
    for (const auto& [region, count] : bundle.geo.regions) {
      append_csv(csv, {region, std::to_string(count)});
    }
    append_csv(csv, {"_undetermined", std::to_string(bundle.geo.undetermined)});
    write_file(root / "tables" / "map_data.csv", csv);

    csv.clear();
    append_csv(csv, {"source", "middle", "target", "count"});
    for (const auto& f : bundle.alluvial) {
      append_csv(csv, {f.source, f.middle, f.target, std::to_string(f.count)});
    }
    write_file(root / "tables" / "alluvial.csv", csv);
  }

  if (has(ReportFormat::HumanReadable)) {
    std::string md;
    md += "# Registry scan report\n\n";
    md += "Pipeline: " + bundle.metadata.pipeline_name + " (" +
          bundle.metadata.pipeline_fingerprint + ")\n\n";
    md += "Dataset: " + bundle.metadata.dataset_path + " (" +
          bundle.metadata.dataset_fingerprint + ")\n\n";
    md += "## Stage counts\n\n| stage | count |\n|---|---|\n";
    for (const auto& [name, count] : bundle.stage_counts) {
      md += "| " + name + " | " + std::to_string(count) + " |\n";
    }
    md += "\nRows read: " + std::to_string(bundle.ingest.rows_read) +
          ", emitted: " + std::to_string(bundle.ingest.rows_emitted) +
          ", skipped: " + std::to_string(bundle.ingest.rows_skipped_malformed) + "\n";
    md += "\n## Origin x kind x AI\n\n";
    md += "| " ;
    for (const auto& d : bundle.origin_kind_ai.dims) md += d + " | ";
    md += "count |\n|";
    for (std::size_t i = 0; i <= bundle.origin_kind_ai.dims.size(); ++i) md += "---|";
    md += "\n";
    for (const auto& [key, count] : bundle.origin_kind_ai.cells) {
      md += "| ";
      for (const auto& k : key) md += (k.empty() ? "(unknown)" : k) + " | ";
      md += std::to_string(count) + " |\n";
    }
    for (const auto& [name, dist] : bundle.distributions) {
      md += "\n## " + name + " (denominator " + std::to_string(dist.denominator) +
            ", unlabeled " + std::to_string(dist.unlabeled) + ")\n\n";
      md += "| value | count | pct |\n|---|---|---|\n";
      for (const auto& r : dist.rows) {
        md += "| " + r.value + " | " + std::to_string(r.count) + " | " + r.pct_text + " |\n";
      }
    }
    md += "\n## Geography (non-foreign)\n\n| region | count |\n|---|---|\n";
    for (const auto& [region, count] : bundle.geo.regions) {
      md += "| " + region + " | " + std::to_string(count) + " |\n";
    }
    md += "| (undetermined) | " + std::to_string(bundle.geo.undetermined) + " |\n";
    md += "\n## Flows (kind -> class -> pathway)\n\n| source | middle | target | count |\n";
    md += "|---|---|---|---|\n";
    for (const auto& f : bundle.alluvial) {
      md += "| " + f.source + " | " + f.middle + " | " + f.target + " | " +
            std::to_string(f.count) + " |\n";
    }
    md += "\n## Audit\n\n";
    md += "- exclusions applied: " + std::to_string(bundle.audit.exclusions_applied.size()) +
          " (stale: " + std::to_string(bundle.audit.exclusions_stale.size()) + ")\n";
    md += "- sidecar overrides: " + std::to_string(bundle.audit.overrides.size()) +
          " (stale: " + std::to_string(bundle.audit.sidecar_stale.size()) + ")\n";
    md += "- origin fallbacks: " + std::to_string(bundle.audit.origin_fallback_count) +
          ", undetermined: " + std::to_string(bundle.audit.origin_undetermined_count) + "\n";
    md += "- technique defaulted: " + std::to_string(bundle.audit.technique_defaulted_count) +
          "\n";
    md += "- registration parse failures: " +
          std::to_string(bundle.audit.regnum_parse_failures) + "\n";
    md += "- code/category inconsistencies: " +
          std::to_string(bundle.audit.regnum_code_inconsistencies) + "\n";
    write_file(root / "report.md", md);
  }
}

}  // namespace mdsw
