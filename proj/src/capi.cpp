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

#include "mdsw.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "mdsw/naive_eval.hpp"
#include "mdsw/scan.hpp"
#include "mdsw/synth.hpp"
#include "mdsw/udi.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

thread_local std::string g_last_error;

mdsw_status status_from_errc(mdsw::Errc c) {
  switch (c) {
    case mdsw::Errc::Ok: return MDSW_OK;
    case mdsw::Errc::InvalidArgument: return MDSW_ERR_INVALID_ARG;
    case mdsw::Errc::SpecError: return MDSW_ERR_SPEC;
    case mdsw::Errc::ArchiveUnreadable: return MDSW_ERR_ARCHIVE;
    case mdsw::Errc::HeaderMismatch: return MDSW_ERR_HEADER;
    case mdsw::Errc::EncodingError: return MDSW_ERR_ENCODING;
    case mdsw::Errc::ParseError: return MDSW_ERR_PARSE;
    case mdsw::Errc::IoError: return MDSW_ERR_IO;
    case mdsw::Errc::Internal: return MDSW_ERR_INTERNAL;
  }
  return MDSW_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
mdsw_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const mdsw::Error& e) {
    g_last_error = e.what();
    return status_from_errc(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MDSW_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MDSW_ERR_INTERNAL;
  }
}

mdsw_status invalid_arg(const char* msg) {
  g_last_error = msg;
  return MDSW_ERR_INVALID_ARG;
}

mdsw::ScanOptions to_scan_options(const mdsw_scan_options& o) {
  mdsw::ScanOptions s;
  s.dataset_path = o.dataset_path ? o.dataset_path : "";
  s.pipeline_path = o.pipeline_path ? o.pipeline_path : "";
  s.schema_path = o.schema_path ? o.schema_path : "";
  s.keyword_lexicon_path = o.keyword_lexicon ? o.keyword_lexicon : "";
  s.technique_lexicon_path = o.technique_lexicon ? o.technique_lexicon : "";
  s.specialty_lexicon_path = o.specialty_lexicon ? o.specialty_lexicon : "";
  s.function_lexicon_path = o.function_lexicon ? o.function_lexicon : "";
  s.exclusions_path = o.exclusions_path ? o.exclusions_path : "";
  s.sidecar_path = o.sidecar_path ? o.sidecar_path : "";
  s.out_dir = o.out_dir ? o.out_dir : "";
  s.workers = o.workers;
  s.dedup_by_di = o.dedup_by_di != 0;
  if (o.delimiter && o.delimiter[0] != '\0') {
    if (o.delimiter[1] != '\0') {
      mdsw::fail(mdsw::Errc::InvalidArgument, "delimiter must be a single byte");
    }
    s.delimiter = o.delimiter[0];
  }
  if (o.encoding && o.encoding[0] != '\0') {
    if (!mdsw::encoding_policy_from_name(o.encoding, s.encoding)) {
      mdsw::fail(mdsw::Errc::InvalidArgument,
                 std::string("unknown encoding policy: ") + o.encoding);
    }
  }
  return s;
}

ordered_json udi_to_json(const mdsw::UdiCode& code, const mdsw::UdiAgencyTable& table) {
  ordered_json j;
  j["agency"] = mdsw::udi_agency_name(code.di.agency);
  j["di"] = code.di.canonical;
  j["part1"] = code.di.part1;
  j["part2"] = code.di.part2;
  if (code.di.agency == mdsw::UdiAgency::GS1) {
    auto check = mdsw::validate_gtin14_check(code.di.canonical);
    j["check_digit_valid"] = check.ok() && check.value;
  }
  ordered_json pi;
  if (code.pi.lot) pi["lot"] = *code.pi.lot;
  if (code.pi.serial) pi["serial"] = *code.pi.serial;
  auto date_json = [](const mdsw::UdiDate& d, bool month_precision) {
    ordered_json dj;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04u-%02u-%02u", static_cast<unsigned>(d.year),
                  static_cast<unsigned>(d.month), static_cast<unsigned>(d.day));
    dj["date"] = buf;
    dj["month_precision"] = month_precision;
    return dj;
  };
  if (code.pi.production_date) {
    pi["production"] = date_json(*code.pi.production_date, code.pi.production_month_precision);
  }
  if (code.pi.expiry_date) {
    pi["expiry"] = date_json(*code.pi.expiry_date, code.pi.expiry_month_precision);
  }
  j["pi"] = std::move(pi);
  j["canonical"] = mdsw::serialize_udi(code);
  (void)table;
  return j;
}

}  // namespace

struct mdsw_pipeline {
  mdsw::PipelineSpec spec;
  mdsw::KeywordLexicon lexicon;
  mdsw::RulePipeline compiled;
};

extern "C" {

const char* mdsw_version(void) { return mdsw::mdsw_version_string(); }

const char* mdsw_last_error(void) { return g_last_error.c_str(); }

void mdsw_string_free(char* s) { std::free(s); }

mdsw_status mdsw_udi_parse(const char* raw, char** json_out) {
  if (!raw || !json_out) return invalid_arg("raw and json_out are required");
  return guarded([&]() -> mdsw_status {
    const auto& table = mdsw::UdiAgencyTable::builtin();
    auto parsed = mdsw::parse_udi(raw, table);
    if (!parsed.ok()) {
      g_last_error = std::string("UDI parse failed: ") + mdsw::parse_errc_name(parsed.error);
      return MDSW_ERR_PARSE;
    }
    *json_out = dup_string(udi_to_json(parsed.value, table).dump(2));
    return MDSW_OK;
  });
}

mdsw_status mdsw_regnum_parse(const char* raw, const char* grammar_path, char** json_out) {
  if (!raw || !json_out) return invalid_arg("raw and json_out are required");
  return guarded([&]() -> mdsw_status {
    mdsw::RegnumTable loaded;
    const mdsw::RegnumTable* table = &mdsw::RegnumTable::builtin();
    if (grammar_path && grammar_path[0] != '\0') {
      loaded = mdsw::RegnumTable::load_file(grammar_path);
      table = &loaded;
    }
    auto parsed = mdsw::parse_registration_number(raw, *table);
    if (!parsed.ok()) {
      g_last_error =
          std::string("registration number parse failed: ") + mdsw::parse_errc_name(parsed.error);
      return MDSW_ERR_PARSE;
    }
    const mdsw::RegistrationNumber& r = parsed.value;
    ordered_json j;
    j["origin"] = mdsw::origin_name(r.origin);
    j["scope"] = r.scope;
    j["year"] = r.year;
    j["device_class"] = mdsw::device_class_name(r.device_class);
    j["category"] = r.category;
    j["serial"] = r.serial;
    j["canonical"] = mdsw::format_registration_number(r, *table);
    *json_out = dup_string(j.dump(2));
    return MDSW_OK;
  });
}

mdsw_status mdsw_pipeline_compile(const char* spec_path, const char* lexicon_path,
                                  mdsw_pipeline** out) {
  if (!out) return invalid_arg("out is required");
  return guarded([&]() -> mdsw_status {
    auto p = std::make_unique<mdsw_pipeline>();
    p->spec = spec_path && spec_path[0] ? mdsw::PipelineSpec::load_file(spec_path)
                                        : mdsw::PipelineSpec::builtin_paper();
    p->lexicon = lexicon_path && lexicon_path[0]
                     ? mdsw::KeywordLexicon::load_file(lexicon_path)
                     : mdsw::KeywordLexicon::builtin();
    p->compiled = mdsw::RulePipeline::compile(p->spec, p->lexicon);
    *out = p.release();
    return MDSW_OK;
  });
}

mdsw_status mdsw_pipeline_compile_json(const char* spec_json, const char* lexicon_path,
                                       mdsw_pipeline** out) {
  if (!spec_json || !out) return invalid_arg("spec_json and out are required");
  return guarded([&]() -> mdsw_status {
    auto p = std::make_unique<mdsw_pipeline>();
    p->spec = mdsw::PipelineSpec::from_json_text(spec_json, "inline pipeline");
    p->lexicon = lexicon_path && lexicon_path[0]
                     ? mdsw::KeywordLexicon::load_file(lexicon_path)
                     : mdsw::KeywordLexicon::builtin();
    p->compiled = mdsw::RulePipeline::compile(p->spec, p->lexicon);
    *out = p.release();
    return MDSW_OK;
  });
}

void mdsw_pipeline_free(mdsw_pipeline* p) { delete p; }

mdsw_status mdsw_pipeline_stage_count(const mdsw_pipeline* p, size_t* out) {
  if (!p || !out) return invalid_arg("pipeline and out are required");
  *out = p->compiled.stage_count();
  return MDSW_OK;
}

mdsw_status mdsw_pipeline_stage_name(const mdsw_pipeline* p, size_t index, char** out) {
  if (!p || !out) return invalid_arg("pipeline and out are required");
  if (index >= p->compiled.stage_count()) return invalid_arg("stage index out of range");
  *out = dup_string(p->compiled.stage_name(index));
  return MDSW_OK;
}

mdsw_status mdsw_pipeline_eval_record(const mdsw_pipeline* p, const char* record_json,
                                      char** stages_json_out) {
  if (!p || !record_json || !stages_json_out) {
    return invalid_arg("pipeline, record_json and stages_json_out are required");
  }
  return guarded([&]() -> mdsw_status {
    ordered_json doc;
    try {
      doc = ordered_json::parse(record_json);
    } catch (const nlohmann::json::exception& e) {
      g_last_error = std::string("record JSON invalid: ") + e.what();
      return MDSW_ERR_PARSE;
    }
    auto get = [&](const char* key) {
      return doc.contains(key) ? mdsw::text::normalize(doc[key].get<std::string>())
                               : std::string();
    };
    mdsw::DeviceRecord rec;
    rec.record_id = doc.value("record_id", "record");
    rec.product_name = get("product_name");
    rec.generic_name = get("generic_name");
    rec.description = get("description");
    rec.manufacturer = get("manufacturer");
    rec.region_raw = get("region");
    rec.classification_code_raw = get("classification_code");
    rec.registration_number_raw = get("registration_number");

    mdsw::RulePipeline::EvalScratch scratch;
    std::uint32_t bits = p->compiled.evaluate(rec.view(), scratch, nullptr);
    ordered_json stages = ordered_json::array();
    for (std::size_t i = 0; i < p->compiled.stage_count(); ++i) {
      if ((bits >> i) & 1) stages.push_back(p->compiled.stage_name(i));
    }
    *stages_json_out = dup_string(stages.dump());
    return MDSW_OK;
  });
}

mdsw_status mdsw_scan(const mdsw_scan_options* options, char** summary_json_out) {
  if (!options || !options->dataset_path || !summary_json_out) {
    return invalid_arg("options with dataset_path and summary_json_out are required");
  }
  return guarded([&]() -> mdsw_status {
    mdsw::ScanOptions s = to_scan_options(*options);
    mdsw::ScanResult r = mdsw::run_scan(s);
    ordered_json j;
    ordered_json counts;
    for (std::size_t i = 0; i < r.stage_names.size(); ++i) {
      counts[r.stage_names[i]] = r.stage_counts[i];
    }
    j["stage_counts"] = std::move(counts);
    if (!r.stage_distinct_di.empty()) {
      ordered_json dd;
      for (std::size_t i = 0; i < r.stage_names.size(); ++i) {
        dd[r.stage_names[i]] = r.stage_distinct_di[i];
      }
      j["stage_distinct_di"] = std::move(dd);
    }
    j["mdsw_total"] = r.mdsw_total;
    j["aimd_final_total"] = r.aimd_final_total;
    j["rows_read"] = r.ingest.rows_read;
    j["rows_emitted"] = r.ingest.rows_emitted;
    j["rows_skipped_malformed"] = r.ingest.rows_skipped_malformed;
    j["per_error_counts"] = r.ingest.per_error_counts;
    j["scan_seconds"] = r.scan_seconds;
    j["exclusions_applied"] = r.exclusion_report.removals.size();
    j["exclusions_stale"] = r.exclusion_report.stale_entries.size();
    j["sidecar_applied"] = r.sidecar_outcome.applied.size();
    j["sidecar_stale"] = r.sidecar_outcome.stale.size();
    j["out_dir"] = s.out_dir;
    *summary_json_out = dup_string(j.dump(2));
    return MDSW_OK;
  });
}

mdsw_status mdsw_synth(const char* recipe_path, const char* out_zip, const char* key_path,
                       char** summary_json_out) {
  if (!recipe_path || !out_zip || !summary_json_out) {
    return invalid_arg("recipe_path, out_zip and summary_json_out are required");
  }
  return guarded([&]() -> mdsw_status {
    mdsw::CorpusRecipe recipe = mdsw::CorpusRecipe::load_file(recipe_path);
    std::string key = key_path && key_path[0] ? key_path : std::string(out_zip) + ".key.tsv";
    mdsw::SynthSummary s = mdsw::synthesize_corpus(recipe, out_zip, key);
    ordered_json j;
    j["rows"] = s.rows;
    j["category_counts"] = s.category_counts;
    j["expected_stage_counts"] = s.expected_stage_counts;
    j["archive"] = out_zip;
    j["answer_key"] = key;
    *summary_json_out = dup_string(j.dump(2));
    return MDSW_OK;
  });
}

mdsw_status mdsw_verify(const mdsw_scan_options* options, const char* answer_key_path,
                        char** report_json_out) {
  if (!options || !options->dataset_path || !report_json_out) {
    return invalid_arg("options with dataset_path and report_json_out are required");
  }
  return guarded([&]() -> mdsw_status {
    mdsw::ScanOptions s = to_scan_options(*options);
    mdsw::VerifyResult v =
        mdsw::verify_dataset(s, answer_key_path ? answer_key_path : "");
    ordered_json j;
    j["records"] = v.records;
    j["route_mismatches"] = v.route_mismatches;
    j["key_mismatches"] = v.key_mismatches;
    j["key_entries_unseen"] = v.key_entries_unseen;
    j["pass"] = v.pass;
    j["samples"] = v.samples;
    *report_json_out = dup_string(j.dump(2));
    return MDSW_OK;
  });
}

mdsw_status mdsw_bench(uint64_t rows, const char* workdir, int workers,
                       char** report_json_out) {
  if (!workdir || !report_json_out) {
    return invalid_arg("workdir and report_json_out are required");
  }
  return guarded([&]() -> mdsw_status {
    mdsw::BenchResult b = mdsw::run_bench(rows, workdir, workers);
    ordered_json j;
    j["rows"] = b.rows;
    j["synth_seconds"] = b.synth_seconds;
    j["scan_seconds"] = b.scan_seconds;
    j["rows_per_second"] = b.rows_per_second;
    j["peak_rss_bytes"] = b.peak_rss_bytes;
    ordered_json counts;
    for (const auto& [name, count] : b.stage_counts) counts[name] = count;
    j["stage_counts"] = std::move(counts);
    *report_json_out = dup_string(j.dump(2));
    return MDSW_OK;
  });
}

}  // extern "C"
