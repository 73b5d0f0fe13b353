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

// Command-line frontend over the C API (mdsw.h). Exit codes are the
// mdsw_status values: 2 bad spec document, 3 unreadable archive, 4 header
// mismatch, and so on; 0 on success.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mdsw.h"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

int fail_with(mdsw_status status) {
  std::fprintf(stderr, "error: %s\n", mdsw_last_error());
  return static_cast<int>(status);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  mdsw_string_free(s);
  return out;
}

// Default asset paths from $MDSW_ASSETS when the flag was not given.
std::string asset_default(const std::string& explicit_path, const char* filename) {
  if (!explicit_path.empty()) return explicit_path;
  const char* dir = std::getenv("MDSW_ASSETS");
  if (!dir || !*dir) return "";
  fs::path candidate = fs::path(dir) / filename;
  std::error_code ec;
  return fs::exists(candidate, ec) ? candidate.string() : "";
}

struct ScanFlags {
  std::string dataset, pipeline, schema, lexicon, technique, specialty, function;
  std::string exclusions, sidecar, out, encoding = "auto", delimiter = ",";
  int workers = 0;
  bool dedup = false;

  void add_common(CLI::App* cmd, bool with_out) {
    cmd->add_option("--dataset", dataset, "registry dump archive (zip)")->required();
    cmd->add_option("--pipeline", pipeline, "pipeline spec JSON (default: builtin)");
    cmd->add_option("--schema", schema, "schema map JSON (default: builtin)");
    cmd->add_option("--lexicon", lexicon, "keyword lexicon TSV (default: builtin)");
    cmd->add_option("--technique-lexicon", technique, "technique lexicon TSV");
    cmd->add_option("--specialty-lexicon", specialty, "specialty lexicon TSV");
    cmd->add_option("--function-lexicon", function, "function lexicon TSV");
    cmd->add_option("--exclusions", exclusions, "exclusion list TSV");
    cmd->add_option("--sidecar", sidecar, "sidecar annotation TSV");
    cmd->add_option("--encoding", encoding, "utf8|gbk|auto (default auto)");
    cmd->add_option("--delimiter", delimiter, "field delimiter (default ,)");
    cmd->add_option("--workers", workers, "worker threads (default: all cores)");
    cmd->add_flag("--dedup", dedup, "also report distinct-DI counts per stage");
    if (with_out) cmd->add_option("--out", out, "report output directory")->required();
  }

  mdsw_scan_options to_options() {
    lexicon = asset_default(lexicon, "keyword_lexicon.tsv");
    technique = asset_default(technique, "technique_lexicon.tsv");
    specialty = asset_default(specialty, "specialty_lexicon.tsv");
    function = asset_default(function, "function_lexicon.tsv");
    mdsw_scan_options o{};
    o.dataset_path = dataset.c_str();
    o.pipeline_path = pipeline.empty() ? nullptr : pipeline.c_str();
    o.schema_path = schema.empty() ? nullptr : schema.c_str();
    o.keyword_lexicon = lexicon.empty() ? nullptr : lexicon.c_str();
    o.technique_lexicon = technique.empty() ? nullptr : technique.c_str();
    o.specialty_lexicon = specialty.empty() ? nullptr : specialty.c_str();
    o.function_lexicon = function.empty() ? nullptr : function.c_str();
    o.exclusions_path = exclusions.empty() ? nullptr : exclusions.c_str();
    o.sidecar_path = sidecar.empty() ? nullptr : sidecar.c_str();
    o.out_dir = out.empty() ? nullptr : out.c_str();
    o.encoding = encoding.c_str();
    o.delimiter = delimiter.c_str();
    o.workers = workers;
    o.dedup_by_di = dedup ? 1 : 0;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"registry MDSW/AIMD scan engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mdsw_version()));

  // scan
  ScanFlags scan_flags;
  CLI::App* scan_cmd = app.add_subcommand("scan", "run the filter pipeline over a dump");
  scan_flags.add_common(scan_cmd, /*with_out=*/true);

  // udi parse
  CLI::App* udi_cmd = app.add_subcommand("udi", "UDI utilities");
  std::string udi_code;
  CLI::App* udi_parse = udi_cmd->add_subcommand("parse", "parse a UDI code");
  udi_parse->add_option("code", udi_code, "UDI text")->required();

  // regnum parse
  CLI::App* regnum_cmd = app.add_subcommand("regnum", "registration number utilities");
  std::string regnum_text, grammar_path;
  CLI::App* regnum_parse = regnum_cmd->add_subcommand("parse", "decode a certificate number");
  regnum_parse->add_option("number", regnum_text, "certificate number")->required();
  regnum_parse->add_option("--grammar", grammar_path, "prefix grammar TSV");

  // synth
  std::string recipe_path, synth_out, synth_key;
  CLI::App* synth_cmd = app.add_subcommand("synth", "synthesize a corpus with answer key");
  synth_cmd->add_option("--recipe", recipe_path, "recipe JSON")->required();
  synth_cmd->add_option("--out", synth_out, "output archive path")->required();
  synth_cmd->add_option("--key", synth_key, "answer key path (default <out>.key.tsv)");

  // verify
  ScanFlags verify_flags;
  std::string answer_key;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "compare both evaluation routes and the answer key");
  verify_flags.add_common(verify_cmd, /*with_out=*/false);
  verify_cmd->add_option("--answer-key", answer_key, "answer key TSV");

  // bench
  std::uint64_t bench_rows = 4000000;
  std::string bench_workdir = "bench_work";
  int bench_workers = 0;
  CLI::App* bench_cmd = app.add_subcommand("bench", "measure scan throughput and memory");
  bench_cmd->add_option("--rows", bench_rows, "corpus size (default 4000000)");
  bench_cmd->add_option("--workdir", bench_workdir, "working directory");
  bench_cmd->add_option("--workers", bench_workers, "worker threads");

  CLI11_PARSE(app, argc, argv);

  if (scan_cmd->parsed()) {
    mdsw_scan_options o = scan_flags.to_options();
    char* out = nullptr;
    mdsw_status rc = mdsw_scan(&o, &out);
    if (rc != MDSW_OK) return fail_with(rc);
    json j = json::parse(take(out));
    std::string counts = "counts:";
    for (auto& [name, value] : j["stage_counts"].items()) {
      counts += " " + name + "=" + std::to_string(value.get<std::uint64_t>());
    }
    std::printf("%s\n", counts.c_str());
    std::printf("rows: read=%llu emitted=%llu skipped=%llu\n",
                j["rows_read"].get<unsigned long long>(),
                j["rows_emitted"].get<unsigned long long>(),
                j["rows_skipped_malformed"].get<unsigned long long>());
    std::printf("final AIMD: %llu (exclusions applied: %llu, stale: %llu)\n",
                j["aimd_final_total"].get<unsigned long long>(),
                j["exclusions_applied"].get<unsigned long long>(),
                j["exclusions_stale"].get<unsigned long long>());
    if (j.contains("stage_distinct_di")) {
      std::string dd = "distinct DI:";
      for (auto& [name, value] : j["stage_distinct_di"].items()) {
        dd += " " + name + "=" + std::to_string(value.get<std::uint64_t>());
      }
      std::printf("%s\n", dd.c_str());
    }
    std::printf("report: %s\n", j["out_dir"].get<std::string>().c_str());
    return 0;
  }

  if (udi_cmd->parsed() && udi_parse->parsed()) {
    char* out = nullptr;
    mdsw_status rc = mdsw_udi_parse(udi_code.c_str(), &out);
    if (rc != MDSW_OK) return fail_with(rc);
    std::printf("%s\n", take(out).c_str());
    return 0;
  }

  if (regnum_cmd->parsed() && regnum_parse->parsed()) {
    char* out = nullptr;
    mdsw_status rc = mdsw_regnum_parse(
        regnum_text.c_str(), grammar_path.empty() ? nullptr : grammar_path.c_str(), &out);
    if (rc != MDSW_OK) return fail_with(rc);
    std::printf("%s\n", take(out).c_str());
    return 0;
  }

  if (synth_cmd->parsed()) {
    char* out = nullptr;
    mdsw_status rc = mdsw_synth(recipe_path.c_str(), synth_out.c_str(),
                                synth_key.empty() ? nullptr : synth_key.c_str(), &out);
    if (rc != MDSW_OK) return fail_with(rc);
    json j = json::parse(take(out));
    std::printf("wrote %s (%llu rows) and key %s\n",
                j["archive"].get<std::string>().c_str(),
                j["rows"].get<unsigned long long>(),
                j["answer_key"].get<std::string>().c_str());
    std::string expect = "expected stages:";
    for (auto& [name, value] : j["expected_stage_counts"].items()) {
      expect += " " + name + "=" + std::to_string(value.get<std::uint64_t>());
    }
    std::printf("%s\n", expect.c_str());
    return 0;
  }

  if (verify_cmd->parsed()) {
    mdsw_scan_options o = verify_flags.to_options();
    char* out = nullptr;
    mdsw_status rc =
        mdsw_verify(&o, answer_key.empty() ? nullptr : answer_key.c_str(), &out);
    if (rc != MDSW_OK) return fail_with(rc);
    json j = json::parse(take(out));
    bool pass = j["pass"].get<bool>();
    std::printf("records: %llu\n", j["records"].get<unsigned long long>());
    std::printf("route mismatches (compiled vs naive): %llu\n",
                j["route_mismatches"].get<unsigned long long>());
    std::printf("key mismatches: %llu (key entries unseen: %llu)\n",
                j["key_mismatches"].get<unsigned long long>(),
                j["key_entries_unseen"].get<unsigned long long>());
    for (auto& s : j["samples"]) std::printf("  %s\n", s.get<std::string>().c_str());
    std::printf("verdict: %s\n", pass ? "EXACT MATCH" : "MISMATCH");
    return pass ? 0 : 1;
  }

  if (bench_cmd->parsed()) {
    char* out = nullptr;
    mdsw_status rc = mdsw_bench(bench_rows, bench_workdir.c_str(), bench_workers, &out);
    if (rc != MDSW_OK) return fail_with(rc);
    json j = json::parse(take(out));
    std::printf("rows: %llu\n", j["rows"].get<unsigned long long>());
    std::printf("synth: %.2f s\n", j["synth_seconds"].get<double>());
    std::printf("scan: %.2f s (%.0f rows/s)\n", j["scan_seconds"].get<double>(),
                j["rows_per_second"].get<double>());
    std::printf("peak rss: %.1f MB\n",
                static_cast<double>(j["peak_rss_bytes"].get<std::uint64_t>()) / (1024 * 1024));
    std::string counts = "counts:";
    for (auto& [name, value] : j["stage_counts"].items()) {
      counts += " " + name + "=" + std::to_string(value.get<std::uint64_t>());
    }
    std::printf("%s\n", counts.c_str());
    return 0;
  }

  return 0;
}
