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
#include <string>
#include <vector>

#include "mdsw/annotate.hpp"
#include "mdsw/report.hpp"
#include "mdsw/rules.hpp"
#include "mdsw/synth.hpp"

namespace mdsw {

struct ScanOptions {
  std::string dataset_path;

  // empty paths fall back to the builtin assets
  std::string pipeline_path;
  std::string pipeline_json;  // inline spec, takes precedence over the path
  std::string schema_path;
  std::string keyword_lexicon_path;
  std::string technique_lexicon_path;
  std::string specialty_lexicon_path;
  std::string function_lexicon_path;
  std::string exclusions_path;  // empty = no exclusion list
  std::string sidecar_path;     // empty = no sidecar

  std::string out_dir;  // empty = no report files
  int workers = 0;      // <= 0 = available parallelism
  bool dedup_by_di = false;
  char delimiter = ',';
  EncodingPolicy encoding = EncodingPolicy::AutoDetect;
  bool collect_provenance = true;
};

struct ScanResult {
  std::vector<std::string> stage_names;
  std::vector<std::uint64_t> stage_counts;
  std::vector<std::uint64_t> stage_distinct_di;  // filled when dedup requested
  std::uint64_t mdsw_total = 0;
  std::uint64_t aimd_final_total = 0;
  IngestStats ingest;
  double scan_seconds = 0;
  std::vector<AnnotatedDevice> devices;  // annotated survivors, row order
  ExclusionReport exclusion_report;
  SidecarOutcome sidecar_outcome;
  ReportBundle bundle;
};

/// Full run: stream the archive, evaluate the pipeline with `workers`
/// parallel lanes, annotate survivors, apply exclusions and sidecar, build
/// analytics and (when out_dir is set) write the report files. Output is
/// bit-identical for any worker count.
ScanResult run_scan(const ScanOptions& options);

struct VerifyResult {
  std::uint64_t records = 0;
  std::uint64_t route_mismatches = 0;  // compiled vs naive evaluation
  std::uint64_t key_mismatches = 0;    // vs answer key (when given)
  std::uint64_t key_entries_unseen = 0;
  bool pass = false;
  std::vector<std::string> samples;  // first few mismatch descriptions
};

/// Replays the dataset through both evaluation routes record by record and,
/// when `answer_key_path` is non-empty, against the synthesized ground
/// truth. Exact match required.
VerifyResult verify_dataset(const ScanOptions& options, const std::string& answer_key_path);

struct BenchResult {
  std::uint64_t rows = 0;
  double synth_seconds = 0;
  double scan_seconds = 0;
  double rows_per_second = 0;
  std::uint64_t peak_rss_bytes = 0;
  std::vector<std::pair<std::string, std::uint64_t>> stage_counts;
};

/// Synthesizes a dump-scale corpus in `workdir` and measures a full scan
/// (ingest + pipeline + reports).
BenchResult run_bench(std::uint64_t rows, const std::string& workdir, int workers);

std::uint64_t peak_rss_bytes();

const char* mdsw_version_string();

}  // namespace mdsw
